"""Print the operation-count envelopes at the reference point and dump the
full surfaces (n = 2..100, bound = 0..10) as CSV."""

import argparse
import csv
import sys

from qmemroute import complexity_envelope

SCHEMES = ("proposed", "kpa", "kpi", "ksp")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-o", "--output", help="CSV file for the surfaces (default: stdout summary only)")
    args = ap.parse_args(argv)

    for scheme in SCHEMES:
        print(f"{scheme:9s} n=100 bound=10 -> N_O = {complexity_envelope(scheme, 100, 10):g}")
    if args.output:
        with open(args.output, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["scheme", "n", "bound", "N_O"])
            for scheme in SCHEMES:
                for bound in range(11):
                    for n in range(2, 101):
                        w.writerow([scheme, n, bound, complexity_envelope(scheme, n, bound)])
        print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
