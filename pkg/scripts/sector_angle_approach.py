"""How slowly the boundary argument of the logarithmic counterexample approaches pi/2.

Prints |Arg(1 - F^(xi))| on a dyadic grid xi = pi 2^-j using the closed-form
generating function, next to the truncated-sum value at window N.  The gap
to pi/2 decays like 1/|log xi|, so no finite window certifies the limit.

Usage::

    python scripts/sector_angle_approach.py [--J 60] [--N 1048576]
"""

import argparse
import math

from ritt_lab.analytic import model_for
from ritt_lab.families import make_counterexample_log
from ritt_lab.transforms import near_zero_grid, sector_report


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--J", type=int, default=60)
    ap.add_argument("--N", type=int, default=1 << 20)
    args = ap.parse_args(argv)
    grid = near_zero_grid(args.J)
    model = model_for({"family": "counterexample_log", "params": {}})
    closed = sector_report(make_counterexample_log(8), grid=grid, model=model)
    trunc = sector_report(make_counterexample_log(args.N), grid=grid)
    print(f"{'xi':>12} {'closed arg':>12} {'pi/2 - arg':>12} {'window arg':>12}")
    for i, xi in enumerate(grid):
        w = "indeterminate" if trunc.indeterminate[i] else f"{trunc.args[i]:12.6f}"
        print(f"{xi:12.4e} {closed.args[i]:12.6f} {math.pi / 2 - closed.args[i]:12.6f} {w:>12}")


if __name__ == "__main__":
    main()
