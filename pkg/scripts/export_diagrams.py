"""Write Graphviz files of the plain and dilated diagrams into a directory."""

import argparse
from pathlib import Path

from portbased.cli import main


def run() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--d", type=int, default=2)
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for dilated in (False, True):
        name = args.outdir / f"diagram_n{args.n}_d{args.d}{'_dilated' if dilated else ''}.dot"
        argv = ["diagram", "--n", str(args.n), "--d", str(args.d), "-o", str(name)]
        main(argv + ["--dilated"] if dilated else argv)
        print(name)


if __name__ == "__main__":
    run()
