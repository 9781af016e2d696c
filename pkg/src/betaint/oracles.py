"""Independent checks: quadrature of the defining integral, beta sampling, Monte Carlo.

None of these share code with the series routes beyond the incomplete beta
function, so agreement between them is a genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beta_integrals import ParamSet
from .errors import DomainError, QuadratureError
from .special_core import betainc_pair, log_beta

#: evaluation budget of the quadrature
QUAD_BUDGET = 2**20
#: default Monte Carlo batch size
_MC_BATCH = 1 << 16


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    stderr: float
    samples: int
    seed: int


def _integrand_sum(p: ParamSet, xs: np.ndarray) -> float:
    """Sum of the tanh-sinh transformed integrand over the nodes ``xs`` (unit step)."""
    u = 0.5 * math.pi * np.sinh(xs)
    # t = 1/(1+exp(-2u)) with both t and 1-t kept in log form
    log_t = -np.logaddexp(0.0, -2.0 * u)
    log_s = -np.logaddexp(0.0, 2.0 * u)
    t = np.exp(log_t)
    s = np.exp(log_s)
    iy, _ = betainc_pair(p.mu, p.mu_prime, t, s)
    iz, _ = betainc_pair(p.nu, p.nu_prime, t, s)
    # dt/dx = pi cosh(x) t (1 - t)
    log_w = p.lam * log_t + p.lam_prime * log_s + np.log(math.pi * np.cosh(xs)) - log_beta(p.lam, p.lam_prime)
    # multiply the two beta factors first so that swapping them is exact
    vals = np.exp(log_w) * (iy * iz)
    return math.fsum(vals)


def b_quadrature(p: ParamSet, tol: float = 1e-12) -> QuadratureResult:
    """Integrate ``t^(lam-1) (1-t)^(lam'-1) I(mu,mu';t) I(nu,nu';t) / B(lam,lam')`` over (0, 1).

    Tanh-sinh rule: ``t = 1/(1 + exp(-pi sinh x))`` maps the real line onto
    (0, 1) and flattens algebraic endpoint singularities.  The step is halved
    until two successive levels differ by less than ``tol``; only the new
    nodes are evaluated at each level.

    Raises
    ------
    QuadratureError
        when the budget of ``QUAD_BUDGET`` evaluations is exhausted; the best
        estimate is attached.
    """
    if not (tol >= 1e-14):
        raise DomainError(f"tol must be at least 1e-14, got {tol!r}")
    # the integrand decays like exp(-pi min(lam, lam') sinh|x|)
    x_max = math.asinh(800.0 / (math.pi * min(p.lam, p.lam_prime))) + 0.5
    h = 0.5
    n = int(math.ceil(x_max / h))
    xs = h * np.arange(-n, n + 1)
    total = _integrand_sum(p, xs)
    evals = xs.size
    estimate = h * total
    while True:
        h *= 0.5
        n = int(math.ceil(x_max / h))
        odd = h * np.arange(-n + (1 - n % 2), n + 1, 2)
        if evals + odd.size > QUAD_BUDGET:
            raise QuadratureError(
                f"tanh-sinh budget of {QUAD_BUDGET} evaluations exhausted", estimate, abs(estimate), evals
            )
        total += _integrand_sum(p, odd)
        evals += odd.size
        new = h * total
        diff = abs(new - estimate)
        estimate = new
        if diff < tol and h < 0.1:
            return QuadratureResult(float(estimate), float(diff), int(evals))


# ---------------------------------------------------------------------------
# Sampling


def _standard_gamma(shape: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Gamma(shape, 1) variates by the Marsaglia-Tsang squeeze method.

    For ``shape < 1`` a Gamma(shape + 1) variate is scaled by ``U**(1/shape)``.
    """
    boost = shape < 1.0
    a = shape + 1.0 if boost else shape
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    filled = 0
    while filled < size:
        need = size - filled
        batch = max(16, int(need * 1.1) + 8)
        x = rng.standard_normal(batch)
        u = rng.random(batch)
        v = (1.0 + c * x) ** 3
        ok = v > 0
        x2 = x * x
        with np.errstate(divide="ignore", invalid="ignore"):
            accept = ok & (
                (u < 1.0 - 0.0331 * x2 * x2)
                | (np.log(u) < 0.5 * x2 + d * (1.0 - v + np.log(np.where(ok, v, 1.0))))
            )
        got = (d * v)[accept][:need]
        out[filled:filled + got.size] = got
        filled += got.size
    if boost:
        out *= rng.random(size) ** (1.0 / shape)
    return out


def sample_beta_array(mu: float, mu_prime: float, size: int, rng: np.random.Generator, method: str = "gamma") -> np.ndarray:
    """``size`` Beta(mu, mu') variates.

    ``method="gamma"`` uses ``G1 / (G1 + G2)`` with independent gamma
    variates; ``method="order"`` (integer parameters only) takes the mu-th
    smallest of ``mu + mu' - 1`` uniforms.
    """
    if not (mu > 0 and mu_prime > 0 and math.isfinite(mu) and math.isfinite(mu_prime)):
        raise DomainError(f"shape parameters must be positive, got {(mu, mu_prime)!r}")
    if method == "gamma":
        g1 = _standard_gamma(mu, size, rng)
        g2 = _standard_gamma(mu_prime, size, rng)
        return g1 / (g1 + g2)
    if method == "order":
        if not (float(mu).is_integer() and float(mu_prime).is_integer()):
            raise DomainError("the order-statistic construction needs integer parameters")
        m, k = int(mu), int(mu) + int(mu_prime) - 1
        u = rng.random((size, k))
        return np.partition(u, m - 1, axis=1)[:, m - 1]
    raise ValueError(f"unknown method {method!r}")


def sample_beta(mu: float, mu_prime: float, rng_state: np.random.Generator, method: str = "gamma") -> float:
    """One Beta(mu, mu') variate drawn from ``rng_state``."""
    return float(sample_beta_array(mu, mu_prime, 1, rng_state, method)[0])


def b_montecarlo(p: ParamSet, samples: int, seed: int, workers: int = 1) -> MCEstimate:
    """Fraction of independent triples with ``X > max(Y, Z)``.

    The seed is split into ``workers`` substreams with ``SeedSequence.spawn``;
    worker ``i`` draws ``samples // workers`` triples (plus one for the first
    ``samples % workers`` workers).  The result depends only on
    ``(seed, samples, workers)``.
    """
    if isinstance(samples, bool) or int(samples) != samples or samples < 1:
        raise DomainError(f"samples must be a positive integer, got {samples!r}")
    samples = int(samples)
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    streams = np.random.SeedSequence(seed).spawn(workers)
    wins = 0
    for i, ss in enumerate(streams):
        rng = np.random.Generator(np.random.PCG64(ss))
        todo = samples // workers + (1 if i < samples % workers else 0)
        while todo > 0:
            n = min(todo, _MC_BATCH)
            x = sample_beta_array(p.lam, p.lam_prime, n, rng)
            y = sample_beta_array(p.mu, p.mu_prime, n, rng)
            z = sample_beta_array(p.nu, p.nu_prime, n, rng)
            wins += int(np.count_nonzero(x > np.maximum(y, z)))
            todo -= n
    est = wins / samples
    return MCEstimate(est, math.sqrt(est * (1.0 - est) / samples), samples, seed)
