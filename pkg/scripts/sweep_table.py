"""Fidelity / success-probability table for every protocol and resource."""

import sys

from portbased.cli import main

if __name__ == "__main__":
    extra = sys.argv[1:] or ["--n-range", "2..6", "--d-range", "2,3"]
    sys.exit(main(["table", *extra]))
