"""Gate counts and log-log fits for both encodings."""

import argparse

from portbased.circuits import gate_count_report, report_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--d", type=int, default=2)
    args = ap.parse_args()
    for enc in ("standard", "yamanouchi"):
        rows, fits = gate_count_report(range(3, args.n_max + 1), [args.d], enc)
        print(report_csv(rows), end="")
        for fit in fits:
            print(f"# {enc} d={fit.d}: total ~ n^{fit.total_exponent:.3f}, depth ~ n^{fit.depth_exponent:.3f}")


if __name__ == "__main__":
    main()
