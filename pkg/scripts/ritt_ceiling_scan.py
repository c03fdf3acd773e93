"""Max n||F^(n) - F^(n+1)|| for the fractional family as the window grows.

For each window N = 2^k the ritt table of A_alpha is computed with the
analytic tail bound; the printed ceiling and flatness show how the
certified bound tightens as more coefficients are kept.

Usage::

    python scripts/ritt_ceiling_scan.py [--alpha 0.5] [--kmin 12] [--kmax 20]
"""

import argparse

from ritt_lab.diagnostics import ritt_table
from ritt_lab.families import make_alpha_frac

GRID = (2, 4, 8, 16, 32, 64, 128, 256)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--kmin", type=int, default=12)
    ap.add_argument("--kmax", type=int, default=20)
    args = ap.parse_args(argv)
    print(f"{'N':>10} {'max upper':>12} {'flatness':>10} {'slope':>8} verdict")
    for k in range(args.kmin, args.kmax + 1, 2):
        t = ritt_table(make_alpha_frac(args.alpha, 1 << k), GRID)
        print(f"{1 << k:>10} {t.max_upper():12.6f} {t.flatness():10.4f} {t.slope_fit.slope:8.3f} {t.verdict()}")


if __name__ == "__main__":
    main()
