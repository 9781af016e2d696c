"""Identity battery shared by the ``verify`` subcommand, the tests and the scripts.

Every check pairs two evaluations that go through different formulas, so a
bug in one route shows up as a residual.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beta_integrals import DispatchPolicy, MethodTag, ParamSet, b_auto, b_general, moment_max, prob_exceeds
from .errors import RangeError, SeriesNonConvergence
from .oracles import b_quadrature

#: moment identity uses B without the single-3F2 lam' = 1 form, which is the moment itself
NO_MOMENT_FORM = DispatchPolicy(single_3f2=False)
#: largest error estimate at which the series route still serves as a check on quadrature
ORACLE_ALT_MAX_ERROR = 1e-9


@dataclass(frozen=True)
class Tolerances:
    swap: float = 0.0
    cyclicity: float = 1e-9
    min_max: float = 1e-9
    moment: float = 1e-10
    oracle: float = 1e-8


@dataclass
class PointReport:
    params: tuple[float, ...]
    value: float
    method: str
    residuals: dict[str, float | None]
    failed: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed


def random_params(count: int, seed: int, lo: float = 0.1, hi: float = 20.0) -> list[ParamSet]:
    """``count`` parameter sets with components log-uniform on ``[lo, hi]``."""
    rng = np.random.Generator(np.random.PCG64(seed))
    raw = np.exp(rng.uniform(np.log(lo), np.log(hi), size=(count, 6)))
    return [ParamSet(*map(float, row)) for row in raw]


def identity_residuals(p: ParamSet, policy: DispatchPolicy | None = None, oracle: bool = True) -> tuple[float, str, dict]:
    """Absolute residuals of swap, cyclicity, min-max duality, the moment identity and quadrature agreement."""
    policy = policy or DispatchPolicy()
    main = b_auto(p, policy)
    b = main.value
    res = {"swap": abs(b - b_auto(p.swapped(), policy).value)}
    c1 = p.cyclic()
    res["cyclicity"] = abs(b + b_auto(c1, policy).value + b_auto(c1.cyclic(), policy).value - 1.0)
    lam, lam_p, mu, mu_p, nu, nu_p = p.as_tuple()
    # X' = 1 - X etc.; B(p) = 1 - P(X' >= Y') - P(X' >= Z') + B(dual)
    dual_side = 1.0 - prob_exceeds(lam_p, lam, mu_p, mu) - prob_exceeds(lam_p, lam, nu_p, nu) + b_auto(p.dual(), policy).value
    res["min_max"] = abs(b - dual_side)
    lam1 = ParamSet(lam, 1.0, mu, mu_p, nu, nu_p)
    res["moment"] = abs(moment_max(lam, mu, mu_p, nu, nu_p) + b_auto(lam1, NO_MOMENT_FORM).value - 1.0)
    if oracle:
        if main.method is MethodTag.QUADRATURE:
            # quadrature against itself proves nothing; use the series route when it is trustworthy here
            res["oracle"] = None
            try:
                alt = b_general(p)
            except (SeriesNonConvergence, RangeError):
                alt = None
            if alt is not None and alt.abs_error_estimate <= ORACLE_ALT_MAX_ERROR:
                res["oracle"] = abs(b - alt.value)
        else:
            res["oracle"] = abs(b - b_quadrature(p, 1e-13).value)
    return b, main.method.value, res


def check_point(p: ParamSet, tol: Tolerances | None = None, policy: DispatchPolicy | None = None, oracle: bool = True) -> PointReport:
    tol = tol or Tolerances()
    value, method, res = identity_residuals(p, policy, oracle)
    failed = [k for k, r in res.items() if r is not None and not r <= getattr(tol, k)]
    return PointReport(p.as_tuple(), value, method, res, failed)


def run_battery(params: list[ParamSet], tol: Tolerances | None = None, oracle: bool = True, workers: int = 1) -> list[PointReport]:
    """Check every point; the reports are sorted by parameter tuple whatever the scheduling."""
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            reports = list(pool.map(check_point, params, [tol] * len(params), [None] * len(params), [oracle] * len(params)))
    else:
        reports = [check_point(p, tol, None, oracle) for p in params]
    return sorted(reports, key=lambda r: r.params)
