"""n^2 (1 - F) for the EPR and optimised dPBT resources at large n.

Uses the closed objective F = objective / d^2, so no operators are built.
Shows where the O(1/n^2) vs O(1/n) separation becomes visible.
"""

import argparse

from portbased.protocols import dpbt_f, dpbt_objective, epr_f


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--ns", default="2,3,4,5,6,8,12,20,40,80")
    args = ap.parse_args()
    d = args.d
    print("n,n2_infid_epr,n2_infid_opt,ratio")
    for n in (int(x) for x in args.ns.split(",")):
        f_opt = dpbt_f(n, d)[1] / d**2
        f_epr = dpbt_objective(epr_f(n, d), n, d) / d**2
        a, b = n * n * (1 - f_epr), n * n * (1 - f_opt)
        print(f"{n},{a:.6f},{b:.6f},{a / b:.4f}")


if __name__ == "__main__":
    main()
