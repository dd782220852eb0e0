"""Mean greedy step count against network size on the inverse-square
small-world lattice family."""

import argparse
import math
import sys

from qmemroute.overlay import GeneratorConfig
from qmemroute.routing import measure_steps


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--trials", type=int, default=400)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    print("n,mean_steps,failures,mean/log2(n)^2")
    prev = None
    for n in args.sizes:
        stats = measure_steps(GeneratorConfig(n=n, family="kleinberg"), args.trials, args.seed)
        print(f"{n},{stats.mean:.3f},{stats.failures},{stats.mean / math.log2(n) ** 2:.4f}")
        if prev is not None:
            ratio = stats.mean / prev[1]
            polylog = (math.log2(n) / math.log2(prev[0])) ** 2
            print(f"# ratio {prev[0]}->{n}: {ratio:.3f} (log^2 ratio {polylog:.3f})")
        prev = (n, stats.mean)
    return 0


if __name__ == "__main__":
    sys.exit(main())
