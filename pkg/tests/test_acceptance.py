"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line; the lines are repeated in the
pytest terminal summary.  Run ``python tests/test_acceptance.py`` to get the
lines without pytest.
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np

from betaint.beta_integrals import ParamSet, b_auto, b_case1, b_case2, b_case3, b_case4, b_general, b_series_4f3, b_series_c, moment_max
from betaint.combinatorics import IntParamSet, b_exact_rational, sequence, t_count, t_count_bruteforce, table_csv
from betaint.oracles import b_quadrature
from betaint.verify import Tolerances, random_params, run_battery
from betaint.walks import WalkConfig, exit_asymptotic_gap, expected_exit_conditioned, expected_exit_unconditioned, simulate_conditioned

try:
    from conftest import GOLDEN
except ImportError:  # run as a script
    from pathlib import Path

    GOLDEN = Path(__file__).parent / "golden"

#: one line per criterion, in the order the tests ran
RESULTS: list[str] = []

#: gap E[T] - (2n - sqrt(2n/pi)) of the square walk, computed once by scripts/exit_gap_band.py
EXIT_GAP_BAND = {
    10: 1.523034343849728,
    50: 1.516166555225952,
    100: 1.512458679003164,
    500: 1.506189709237276,
}
EXIT_GAP_TOL = 1e-12

IDENTITY_GRID_SEED = 2024
ROUTE_GRID_SEED = 11
CLOSED_CASE_SEED = 5


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_1_tables():
    start = time.perf_counter()
    mismatched = [k for k in ("t11mmnn", "t11mm1nn1", "t11mnmn") if table_csv(k, 6) != (GOLDEN / f"{k}.csv").read_text()]
    elapsed = time.perf_counter() - start
    record(1, "tables reproduced exactly", not mismatched and elapsed < 5.0,
           f"mismatched {mismatched or 'none'}, {elapsed:.2f}s")


def test_criterion_2_sequences():
    iid = sequence("iid_diag", 5)
    mm1 = sequence("mm1_diag", 5)
    ok = iid == [2, 52, 1086, 20840, 382510] and mm1 == [16, 306, 5664, 101950, 1798776]
    record(2, "diagonal count sequences", ok, f"{iid}; {mm1}")


def test_criterion_3_pm_norms():
    bad = []
    for m in range(1, 9):
        norm = Fraction(1, 2) - Fraction(math.factorial(2 * m) ** 4, 4 * math.factorial(4 * m) * math.factorial(m) ** 4)
        if norm != b_exact_rational(IntParamSet(1, 1, m, m, m, m)):
            bad.append(m)
    record(3, "||p_m||^2 equals the exact B(1,1,m,m,m,m) for m = 1..8", not bad, f"mismatches at m = {bad or 'none'}")


def test_criterion_4_bruteforce_sweep():
    start = time.perf_counter()
    checked, bad = 0, []
    for tup in itertools.product(range(1, 13), repeat=6):
        p = IntParamSet(*tup)
        if p.L + p.M + p.N > 12:
            continue
        checked += 1
        if t_count(p) != t_count_bruteforce(p):
            bad.append(tup)
    elapsed = time.perf_counter() - start
    record(4, "t_count equals enumeration for L+M+N <= 12", not bad and elapsed < 600,
           f"{checked} sets, {len(bad)} mismatches, {elapsed:.1f}s")


def test_criterion_5_identities_and_routes():
    tol = Tolerances(swap=0.0, cyclicity=1e-9, min_max=1e-9, moment=1e-10)
    reports = run_battery(random_params(200, IDENTITY_GRID_SEED, 0.1, 20.0), tol, oracle=False)
    worst = {k: max(r.residuals[k] for r in reports) for k in ("swap", "cyclicity", "min_max", "moment")}
    failed = [r.params for r in reports if not r.ok]

    routes = {"kdf": b_general, "series_c": b_series_c, "series_4f3": b_series_4f3, "auto": b_auto}
    route_worst = dict.fromkeys(routes, 0.0)
    for p in random_params(50, ROUTE_GRID_SEED, 0.5, 8.0):
        ref = b_quadrature(p, 1e-13).value
        for name, route in routes.items():
            route_worst[name] = max(route_worst[name], abs(route(p).value - ref))
    ok = not failed and max(route_worst.values()) <= 1e-8
    detail = ", ".join(f"{k} {v:.2g}" for k, v in worst.items())
    detail += "; routes vs quadrature " + ", ".join(f"{k} {v:.2g}" for k, v in route_worst.items())
    record(5, "identity battery on 200 points and routes vs quadrature on 50", ok, detail)


def test_criterion_6_closed_cases():
    rng = np.random.Generator(np.random.PCG64(CLOSED_CASE_SEED))

    def draws(k):
        return np.exp(rng.uniform(np.log(0.5), np.log(8.0), size=(50, k)))

    worst = {}
    worst["case1"] = max(abs(b_case1(m, n) - b_general(ParamSet(1, 1, m, m, n, n)).value) for m, n in draws(2))
    worst["case2"] = max(abs(b_case2(m, n) - b_general(ParamSet(1, 1, m, m + 1, n, n + 1)).value) for m, n in draws(2))
    worst["case3"] = max(abs(b_case3(m, mp) - b_general(ParamSet(1, 1, m, mp, m, mp)).value) for m, mp in draws(2))
    worst["case4"] = max(abs(b_case4(l, lp, m) - b_general(ParamSet(l, lp, m, 0.5, m, 0.5)).value) for l, lp, m in draws(3))
    record(6, "closed cases agree with the double series", max(worst.values()) <= 1e-10,
           ", ".join(f"{k} {v:.2g}" for k, v in worst.items()))


def test_criterion_7_exit_times():
    exact = expected_exit_conditioned(WalkConfig(2, 2, 1, 1))
    sim = simulate_conditioned(WalkConfig(2, 2, 1, 1), 1_000_000, seed=7)
    gaps = {n: exit_asymptotic_gap(n) for n in EXIT_GAP_BAND}
    band_ok = all(abs(gaps[n] - g) <= EXIT_GAP_TOL for n, g in EXIT_GAP_BAND.items())
    ok = exact == Fraction(8, 3) and abs(sim.z_score) < 4 and band_ok
    record(7, "exit-time mean, simulation and asymptotic band", ok,
           f"E[T] = {exact}, z = {sim.z_score:.2f}, gaps " + ", ".join(f"{n}: {g:.6f}" for n, g in gaps.items()))


def test_criterion_8_unconditioned_exit():
    worst = 0.0
    for n in range(1, 21):
        direct = sum(Fraction(2 * k * math.comb(k - 1, n), 2**k) for k in range(n + 1, 2 * n + 2))
        worst = max(worst, abs(expected_exit_unconditioned(n) - float(direct)))
    record(8, "free-walk exit time matches the direct sum for n = 1..20", worst <= 1e-12, f"worst {worst:.2g}")


def test_criterion_9_uniform_max_moments():
    worst = max(abs(moment_max(lam, 1, 1, 1, 1) - 2 / (lam + 2)) for lam in (0.5, 1, 2, 3.7))
    record(9, "moments of the max of two uniforms", worst <= 1e-10, f"worst {worst:.2g}")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
