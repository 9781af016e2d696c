"""Compute the exit-time gap E[T] - (2n - sqrt(2n/pi)) for the square walk.

The printed values are the regression band frozen in tests/test_acceptance.py.
Each mean is an exact rational; for n <= 100 it is computed both from the
closed-form string count and from the general exact series.

Usage: python scripts/exit_gap_band.py [n ...]
"""

import sys
import time

from betaint.walks import WalkConfig, exit_asymptotic_gap, expected_exit_conditioned, expected_exit_square


def main():
    ns = [int(a) for a in sys.argv[1:]] or [1, 2, 5, 10, 50, 100, 500, 1000, 5000]
    for n in ns:
        mean = expected_exit_square(n)
        check = ""
        if n <= 100:
            t0 = time.perf_counter()
            same = mean == expected_exit_conditioned(WalkConfig.square(n))
            check = f"  series route agrees: {same} ({time.perf_counter() - t0:.2f}s)"
        print(f"n={n:5d}  E[T]={float(mean):.15g}  gap={exit_asymptotic_gap(n):.15f}{check}")


if __name__ == "__main__":
    main()
