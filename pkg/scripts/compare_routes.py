"""Compare every B route with tanh-sinh quadrature on a seeded random grid.

Usage: python scripts/compare_routes.py [--count 50] [--seed 11] [--lo 0.5] [--hi 8]
"""

import argparse
import time

from betaint.beta_integrals import b_auto, b_general, b_series_4f3, b_series_c
from betaint.errors import RangeError, SeriesNonConvergence
from betaint.oracles import b_quadrature
from betaint.verify import random_params

ROUTES = {"kdf": b_general, "series_c": b_series_c, "series_4f3": b_series_4f3, "auto": b_auto}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--lo", type=float, default=0.5)
    ap.add_argument("--hi", type=float, default=8.0)
    args = ap.parse_args()
    worst = {k: 0.0 for k in ROUTES}
    fails = {k: 0 for k in ROUTES}
    secs = {k: 0.0 for k in ROUTES}
    for p in random_params(args.count, args.seed, args.lo, args.hi):
        ref = b_quadrature(p, 1e-13).value
        for name, route in ROUTES.items():
            t0 = time.perf_counter()
            try:
                r = route(p)
            except (SeriesNonConvergence, RangeError) as exc:
                fails[name] += 1
                print(f"{name:10s} {p.as_tuple()} failed: {exc}")
                continue
            finally:
                secs[name] += time.perf_counter() - t0
            diff = abs(r.value - ref)
            worst[name] = max(worst[name], diff)
            if diff > 1e-8 or diff > 10 * r.abs_error_estimate + 1e-13:
                print(f"{name:10s} {p.as_tuple()} diff {diff:.3g} est {r.abs_error_estimate:.3g}")
    for name in ROUTES:
        print(f"{name:10s} worst {worst[name]:.3g}  failures {fails[name]}  time {secs[name]:.1f}s")


if __name__ == "__main__":
    main()
