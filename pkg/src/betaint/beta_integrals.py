"""Evaluation of the integral family B(lambda, lambda', mu, mu', nu, nu').

B is the Euler transform

    B = 1/B(lam, lam') * int_0^1 t^(lam-1) (1-t)^(lam'-1) I(mu, mu'; t) I(nu, nu'; t) dt

which equals ``P(X > max(Y, Z))`` for independent ``X ~ Beta(lam, lam')``,
``Y ~ Beta(mu, mu')`` and ``Z ~ Beta(nu, nu')``.  Several routes are provided:
a double-series closed form (:func:`b_general`), two single-index series
(:func:`b_series_c`, :func:`b_series_4f3`), closed forms for special
parameter patterns, and a dispatcher (:func:`b_auto`).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .errors import DomainError, PoleError, RangeError, SeriesNonConvergence
from .hyper_series import MAX_TERMS, KdFSpec, PFQSpec, SeriesValue, extrapolated_sum, kdf, pfq, rounding_error
from .special_core import log_beta, nonpositive_integer, positive_integer

#: tolerated excursion outside [0, 1] before a result is reported as a bug
RANGE_EPS = 1e-9
_EPS = float(np.finfo(float).eps)
#: agreement between successive extrapolations of the single-index series
SINGLE_SERIES_TOL = 1e-10
#: relative change below which a stalled single-series extrapolation is accepted with a widened error
SINGLE_SERIES_PLATEAU = 1e-8
#: relative error of the direct 3F2 form above which its Thomae partner is also evaluated
THOMAE_RETRY = 1e-12
#: term budget for the Thomae partner when the direct form did converge
THOMAE_RETRY_TERMS = 100_000


def _positive(name: str, x) -> float:
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {x!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise DomainError(f"{name} must be positive and finite, got {x!r}")
    return v


@dataclass(frozen=True)
class ParamSet:
    """The six shape parameters; ``(lam, lam_prime)`` belongs to the variable that must win."""

    lam: float
    lam_prime: float
    mu: float
    mu_prime: float
    nu: float
    nu_prime: float

    def __post_init__(self):
        for name in ("lam", "lam_prime", "mu", "mu_prime", "nu", "nu_prime"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))

    def as_tuple(self) -> tuple[float, ...]:
        return (self.lam, self.lam_prime, self.mu, self.mu_prime, self.nu, self.nu_prime)

    def swapped(self) -> "ParamSet":
        """Exchange the two losing variables."""
        return ParamSet(self.lam, self.lam_prime, self.nu, self.nu_prime, self.mu, self.mu_prime)

    def dual(self) -> "ParamSet":
        """Reflect every variable, ``X -> 1 - X``; maxima become minima."""
        return ParamSet(self.lam_prime, self.lam, self.mu_prime, self.mu, self.nu_prime, self.nu)

    def cyclic(self) -> "ParamSet":
        """Let the first losing variable be the winner."""
        return ParamSet(self.mu, self.mu_prime, self.nu, self.nu_prime, self.lam, self.lam_prime)


class MethodTag(str, enum.Enum):
    KDF_CLOSED_FORM = "kdf_closed_form"
    SERIES_4F3 = "series_4f3"
    SERIES_C = "series_c"
    SPECIAL_CASE_1 = "special_case_1"
    SPECIAL_CASE_2 = "special_case_2"
    SPECIAL_CASE_3 = "special_case_3"
    SPECIAL_CASE_4 = "special_case_4"
    NU_PRIME_ONE = "nu_prime_one"
    LAMBDA_PRIME_ONE = "lambda_prime_one"
    EXACT_RATIONAL = "exact_rational"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class BResult:
    value: float
    method: MethodTag
    abs_error_estimate: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "abs_error_estimate", float(self.abs_error_estimate))
        object.__setattr__(self, "method", MethodTag(self.method))

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method.value,
            "abs_error_estimate": self.abs_error_estimate,
            "diagnostics": _jsonable(self.diagnostics),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _guarded(value: float, method: MethodTag, err: float, diagnostics: dict | None = None) -> BResult:
    if not math.isfinite(value) or value < -RANGE_EPS or value > 1.0 + RANGE_EPS:
        raise RangeError(f"{method.value} produced {value!r}, outside [0, 1]")
    return BResult(value, method, err, diagnostics or {})


# ---------------------------------------------------------------------------
# Double-series closed form


def _c_kdf_scaled(lam, lam_p, mu, mu_p, nu, nu_p, order="auto") -> tuple[float, float, dict]:
    """C(lam, lam', mu, mu', nu, nu') / (B(lam,lam') B(mu,mu') B(nu,nu')) through kdf."""
    a = lam + mu + nu
    spec = KdFSpec([a], [a + mu_p], [lam, 1.0 - lam_p], [lam + 1.0], [nu, 1.0 - nu_p], [nu + 1.0])
    series = kdf(spec, order=order)
    log_scale = log_beta(a, mu_p) - math.log(lam * nu) - log_beta(lam, lam_p) - log_beta(mu, mu_p) - log_beta(nu, nu_p)
    scale = math.exp(log_scale)
    return scale * series.value, scale * (series.abs_error_estimate + rounding_error(series)), series.diagnostics


def _decay_rank(lam, lam_p, mu, mu_p, nu, nu_p) -> float:
    """Slowest predicted outer decay over the two C terms of one orientation."""

    def one(nu_p_, mu_p_):
        if positive_integer(lam_p) is not None or positive_integer(nu_p_) is not None:
            return math.inf
        return 1.0 + mu_p_ + max(lam_p, nu_p_)

    return min(one(nu_p, mu_p), one(mu_p, nu_p))


def _b_kdf_direct(p: ParamSet, order="auto") -> tuple[float, float, dict]:
    lam, lam_p, mu, mu_p, nu, nu_p = p.as_tuple()
    c1, e1, d1 = _c_kdf_scaled(lam, lam_p, mu, mu_p, nu, nu_p, order)
    c2, e2, d2 = _c_kdf_scaled(lam, lam_p, nu, nu_p, mu, mu_p, order)
    value = 1.0 - (c1 + c2)
    err = e1 + e2 + 4 * _EPS * (1.0 + abs(c1) + abs(c2))
    return value, err, {"first": d1, "second": d2}


#: error estimate above which b_general also tries the other orientation
KDF_RETRY_ERROR = 1e-12


def b_general(p: ParamSet, order: str = "auto") -> BResult:
    """B through the two Kampe de Feriet terms.

    ``B = 1 - [C(lam,lam',mu,mu',nu,nu') + C(lam,lam',nu,nu',mu,mu')] / (B(lam,lam') B(mu,mu') B(nu,nu'))``
    with ``C = B(A, mu') / (lam nu) * F^{1:2;2}_{1:1;1}`` and ``A = lam + mu + nu``.

    Either ``p`` itself or its reflection ``p.dual()`` is expanded, whichever
    has the faster-decaying series; the reflection is related to ``p`` by the
    min/max duality.  The other orientation is tried if the first one fails
    to converge or its error estimate exceeds ``KDF_RETRY_ERROR``; the result
    with the smaller estimate is kept.
    """
    orientations = ["direct", "dual"]
    if _decay_rank(*p.dual().as_tuple()) > _decay_rank(*p.as_tuple()):
        orientations.reverse()
    failure = None
    best = None
    for which in orientations:
        try:
            if which == "direct":
                value, err, diag = _b_kdf_direct(p, order)
            else:
                q = p.dual()
                inner, err, diag = _b_kdf_direct(q, order)
                # here q.lam etc. are the reflected shapes, so P(X' >= Y') etc. is
                # prob_exceeds evaluated on q
                py, ey = prob_exceeds_with_error(q.lam, q.lam_prime, q.mu, q.mu_prime)
                pz, ez = prob_exceeds_with_error(q.lam, q.lam_prime, q.nu, q.nu_prime)
                value = 1.0 - py - pz + inner
                err += ey + ez + 4 * _EPS * (1.0 + py + pz)
        except SeriesNonConvergence as exc:
            failure = exc
            continue
        if best is None or err < best[1]:
            best = (value, err, {"orientation": which, **diag})
        if best[1] <= KDF_RETRY_ERROR:
            break
    if best is None:
        raise failure
    return _guarded(best[0], MethodTag.KDF_CLOSED_FORM, best[1], best[2])


# ---------------------------------------------------------------------------
# Single-index series


def c_function(lam, lam_prime, mu, mu_prime, nu, nu_prime) -> SeriesValue:
    """The k-indexed series of 3F2 values for C(lam, lam', mu, mu', nu, nu').

    ``C = sum_k (1-lam')_k B(A+k, mu') / (k! (lam+k) nu) * 3F2(1-nu', nu, A+k; nu+1, A+k+mu'; 1)``
    with ``A = lam + mu + nu``.  The sum has exactly ``lam'`` terms when
    ``lam'`` is a positive integer; otherwise its tail is extrapolated from
    the power-law decay of the terms.

    ``terminated`` and ``abs_error_estimate`` describe the outer sum; the
    truncation error of the inner 3F2 values is in
    ``diagnostics["inner_abs_error"]``.
    """
    lam, lam_prime, mu, mu_prime, nu, nu_prime = (
        _positive(n, v)
        for n, v in zip(("lam", "lam_prime", "mu", "mu_prime", "nu", "nu_prime"), (lam, lam_prime, mu, mu_prime, nu, nu_prime))
    )
    a = lam + mu + nu
    top = 1.0 - lam_prime
    stop = nonpositive_integer(top)

    def block(lo, hi):
        coefs = _falling_coefs(top, hi)[lo:]
        out = np.empty(hi - lo)
        errs = np.empty(hi - lo)
        cost = 0
        for i, k in enumerate(range(lo, hi)):
            # B(A+k, mu') / nu * 3F2(1-nu', nu, A+k; nu+1, A+k+mu'; 1), in its better-conditioned form
            value, err, used = _beta_3f2_terms(nu_prime, nu, a + k, mu_prime)
            weight = coefs[i] / (lam + k)
            out[i] = weight * value
            errs[i] = abs(weight) * err
            cost += used
        return out, errs, cost

    if stop is not None:
        terms, errs, cost = block(0, 1 - stop)
        return SeriesValue(
            math.fsum(terms), 0.0, int(terms.size), True,
            {"inner_abs_error": float(np.sum(errs)), "inner_terms": cost, "abs_sum": float(np.sum(np.abs(terms)))},
        )
    result = extrapolated_sum(
        block, 1.0 + lam_prime + mu_prime, [0.0, nu_prime], rel_tol=SINGLE_SERIES_TOL, plateau_tol=SINGLE_SERIES_PLATEAU
    )
    return SeriesValue(
        result.value, result.abs_error_estimate, result.diagnostics["lines"], False,
        {"tail": result.diagnostics["tail"], "inner_terms": result.terms_used},
    )


def _falling_coefs(top: float, count: int) -> np.ndarray:
    """``(top)_k / k!`` for ``k < count``."""
    ks = np.arange(max(count - 1, 0), dtype=float)
    return np.concatenate([[1.0], np.cumprod((top + ks) / (ks + 1.0))])[:count]


def b_series_c(p: ParamSet) -> BResult:
    """B through two evaluations of :func:`c_function`."""
    lam, lam_p, mu, mu_p, nu, nu_p = p.as_tuple()
    log_norm = log_beta(lam, lam_p) + log_beta(mu, mu_p) + log_beta(nu, nu_p)
    c1 = c_function(lam, lam_p, mu, mu_p, nu, nu_p)
    c2 = c_function(lam, lam_p, nu, nu_p, mu, mu_p)
    scale = math.exp(-log_norm)
    v1, v2 = scale * c1.value, scale * c2.value
    err = scale * (
        c1.abs_error_estimate + c2.abs_error_estimate + rounding_error(c1) + rounding_error(c2)
        + c1.diagnostics.get("inner_abs_error", 0.0) + c2.diagnostics.get("inner_abs_error", 0.0)
    ) + 4 * _EPS
    return _guarded(1.0 - v1 - v2, MethodTag.SERIES_C, err, {"first_terms": c1.terms_used, "second_terms": c2.terms_used})


def _f21_coefs(mu: float, mu_p: float, count: int) -> np.ndarray:
    """Taylor coefficients ``mu (1-mu')_j / ((mu+j) j!)`` of 2F1(1-mu', mu; mu+1; t)."""
    js = np.arange(count, dtype=float)
    return _falling_coefs(1.0 - mu_p, count) * mu / (mu + js)


def b_series_4f3(p: ParamSet) -> BResult:
    """B as an n-indexed series of 4F3 values.

    ``B = 1/(nu B(lam,lam') B(mu,mu') B(nu,nu')) * sum_n (1-mu')_n / ((mu+n) n!) B(lam+mu+nu+n, lam')
    * 4F3(1-nu', nu, -mu-n, -n; 1+nu, mu'-n, 1-mu-n; 1)``.

    ``(1-mu')_n / (mu+n) / n! * mu * 4F3`` is the n-th Taylor coefficient of
    the product ``2F1(1-mu', mu; mu+1; t) 2F1(1-nu', nu; nu+1; t)``.  When
    ``mu'`` is a positive integer and ``n >= mu'``, the prefactor vanishes
    but the 4F3 reaches the pole of ``(mu'-n)_j`` before its terminating
    zero, and the product has a nonzero limit.  Those terms are evaluated as
    the Cauchy product of the two Taylor series instead and counted in
    ``diagnostics["pole_terms"]``.  The series is therefore finite only when
    both ``mu'`` and ``nu'`` are positive integers, with ``mu' + nu' - 1``
    terms.
    """
    lam, lam_p, mu, mu_p, nu, nu_p = p.as_tuple()
    a = lam + mu + nu
    top = 1.0 - mu_p
    stop_mu = nonpositive_integer(top)
    stop_nu = nonpositive_integer(1.0 - nu_p)
    log_norm = math.log(nu) + log_beta(lam, lam_p) + log_beta(mu, mu_p) + log_beta(nu, nu_p)
    pole_terms = [0]

    def block(lo, hi):
        coefs = _falling_coefs(top, hi)[lo:]
        out = np.zeros(hi - lo)
        errs = np.zeros(hi - lo)
        cost = 0
        for i, n in enumerate(range(lo, hi)):
            weight = math.exp(log_beta(a + n, lam_p) - log_norm)
            if coefs[i] != 0.0:
                inner = pfq(PFQSpec([1.0 - nu_p, nu, -mu - n, -float(n)], [1.0 + nu, mu_p - n, 1.0 - mu - n]))
                cost += inner.terms_used
                scale = weight * coefs[i] / (mu + n)
                out[i] = scale * inner.value
                errs[i] = abs(scale) * rounding_error(inner)
            else:
                # limit of the zero prefactor times the 4F3 pole: sum_i a_i b_(n-i) / mu
                ca = _f21_coefs(mu, mu_p, -stop_mu + 1)
                cb = _f21_coefs(nu, nu_p, n + 1)[::-1][: ca.size]
                parts = ca * cb
                out[i] = weight * float(np.sum(parts)) / mu
                errs[i] = weight * 4 * _EPS * float(np.sum(np.abs(parts))) / mu
                cost += ca.size
                pole_terms[0] += 1
        return out, errs, cost

    if stop_mu is not None and stop_nu is not None:
        terms, errs, cost = block(0, 1 - stop_mu - stop_nu)
        value = math.fsum(terms)
        err = float(np.sum(errs)) + 8 * _EPS * (1.0 + float(np.sum(np.abs(terms))))
        return _guarded(
            value, MethodTag.SERIES_4F3, err,
            {"outer_terms": int(terms.size), "terminated": True, "inner_terms": cost, "pole_terms": pole_terms[0]},
        )
    if stop_mu is not None:
        # past n = mu' only the nu' power law of the second factor survives
        decay, offsets = 1.0 + lam_p + nu_p, [0.0]
    else:
        lo_p, hi_p = sorted((mu_p, nu_p))
        decay, offsets = 1.0 + lam_p + lo_p, [0.0, hi_p - lo_p, hi_p]
    result = extrapolated_sum(block, decay, offsets, rel_tol=SINGLE_SERIES_TOL, plateau_tol=SINGLE_SERIES_PLATEAU)
    return _guarded(
        result.value, MethodTag.SERIES_4F3, result.abs_error_estimate,
        {"outer_terms": result.diagnostics["lines"], "terminated": False, "tail": result.diagnostics["tail"],
         "pole_terms": pole_terms[0]},
    )


# ---------------------------------------------------------------------------
# Single 3F2 closed forms


def _f32(a1, a2, a3, b1, b2, max_terms: int = MAX_TERMS) -> SeriesValue:
    return pfq(PFQSpec([a1, a2, a3], [b1, b2]), max_terms=max_terms)


def _beta_3f2_terms(x, y, a, z) -> tuple[float, float, int]:
    """``B(a, z) / y * 3F2(1-x, y, a; y+1, z+a; 1)`` with an absolute error estimate and the terms used.

    For ``x > 1`` the alternating factor ``(1-x)_k`` can make the series
    cancel badly.  The Thomae transformation pivoting on ``y`` gives the
    positive-term form ``B(a, x+z) / z * 3F2(1, a-y+z, x+z; z+1, a+x+z; 1)``.
    It usually converges more slowly, so it is tried only when the direct form
    fails or its error exceeds ``THOMAE_RETRY`` relative (then with a budget of
    ``THOMAE_RETRY_TERMS``), and the smaller error estimate wins.  For ``x <= 1`` the direct form already has terms of one sign.
    """
    candidates = [(log_beta(a, z) - math.log(y), (1.0 - x, y, a, y + 1.0, z + a))]
    if x > 1.0:
        candidates.append((log_beta(a, x + z) - math.log(z), (1.0, a - y + z, x + z, z + 1.0, a + x + z)))
    forms = []
    terms = 0
    for log_scale, spec in candidates:
        if forms and forms[0][0] <= THOMAE_RETRY * abs(forms[0][1]):
            break
        try:
            f = _f32(*spec, max_terms=THOMAE_RETRY_TERMS if forms else MAX_TERMS)
        except SeriesNonConvergence:
            continue
        scale = math.exp(log_scale)
        terms += f.terms_used
        forms.append((scale * (f.abs_error_estimate + rounding_error(f)), scale * f.value))
    if not forms:
        raise SeriesNonConvergence(f"3F2(1-{x}, {y}, {a}; {y}+1, {z}+{a}; 1) did not converge in either form")
    err, value = min(forms)
    return value, err, terms


def _beta_3f2(x, y, a, z) -> tuple[float, float]:
    value, err, _ = _beta_3f2_terms(x, y, a, z)
    return value, err


def _exceeds_form(lam, lam_p, mu, mu_p) -> tuple[float, float]:
    norm = math.exp(-log_beta(lam, lam_p) - log_beta(mu, mu_p))
    v, e = _beta_3f2(mu_p, mu, lam + mu, lam_p)
    return norm * v, norm * e


def prob_exceeds_with_error(lam, lam_prime, mu, mu_prime) -> tuple[float, float]:
    """:func:`prob_exceeds` together with an absolute error estimate."""
    lam, lam_prime, mu, mu_prime = (
        _positive(n, v) for n, v in zip(("lam", "lam_prime", "mu", "mu_prime"), (lam, lam_prime, mu, mu_prime))
    )
    # P(X >= Y) = 1 - P(Y >= X), and reflecting t -> 1 - t swaps each pair.
    # The four forms cancel differently; keep the one with the smallest error.
    candidates = []
    for args, complement in (
        ((lam, lam_prime, mu, mu_prime), False),
        ((mu, mu_prime, lam, lam_prime), True),
        ((mu_prime, mu, lam_prime, lam), False),
        ((lam_prime, lam, mu_prime, mu), True),
    ):
        try:
            v, e = _exceeds_form(*args)
        except SeriesNonConvergence:
            continue
        candidates.append((e + (_EPS if complement else 0.0), 1.0 - v if complement else v))
    if not candidates:
        raise SeriesNonConvergence("no form of the exceedance probability converged")
    err, value = min(candidates)
    if value < -RANGE_EPS or value > 1.0 + RANGE_EPS:
        raise RangeError(f"probability {value!r} outside [0, 1]")
    return value, err


def prob_exceeds(lam, lam_prime, mu, mu_prime) -> float:
    """``P(X >= Y)`` for ``X ~ Beta(lam, lam')`` and ``Y ~ Beta(mu, mu')``.

    ``B(lam+mu, lam') / (mu B(lam,lam') B(mu,mu')) * 3F2(1-mu', mu, lam+mu; mu+1, lam+lam'+mu; 1)``,
    or whichever of its complement and reflections is best conditioned.
    """
    return prob_exceeds_with_error(lam, lam_prime, mu, mu_prime)[0]


def _max_moment_terms(lam, mu, mu_p, nu, nu_p) -> tuple[float, float]:
    """E[max(Y,Z)^lam] as two 3F2 terms, with its absolute error estimate."""
    a = lam + mu + nu
    norm = math.exp(-log_beta(mu, mu_p) - log_beta(nu, nu_p))
    v1, e1 = _beta_3f2(nu_p, nu, a, mu_p)
    v2, e2 = _beta_3f2(mu_p, mu, a, nu_p)
    return norm * (v1 + v2), norm * (e1 + e2) + _EPS


def moment_max(lam, mu, mu_prime, nu, nu_prime) -> float:
    """``E[max(Y, Z)^lam]`` for ``Y ~ Beta(mu, mu')`` and ``Z ~ Beta(nu, nu')``; ``lam = 0`` gives 1."""
    mu, mu_prime, nu, nu_prime = (_positive(n, v) for n, v in zip(("mu", "mu_prime", "nu", "nu_prime"), (mu, mu_prime, nu, nu_prime)))
    lam = float(lam)
    if not (math.isfinite(lam) and lam >= 0):
        raise DomainError(f"lambda must be nonnegative and finite, got {lam!r}")
    if lam == 0.0:
        return 1.0
    return _max_moment_terms(lam, mu, mu_prime, nu, nu_prime)[0]


def b_lambda_prime_one(lam, mu, mu_prime, nu, nu_prime) -> BResult:
    """B with ``lam' = 1``, i.e. ``1 - E[max(Y,Z)^lam]``, as two 3F2 terms."""
    lam, mu, mu_prime, nu, nu_prime = (
        _positive(n, v) for n, v in zip(("lam", "mu", "mu_prime", "nu", "nu_prime"), (lam, mu, mu_prime, nu, nu_prime))
    )
    moment, err = _max_moment_terms(lam, mu, mu_prime, nu, nu_prime)
    return _guarded(1.0 - moment, MethodTag.LAMBDA_PRIME_ONE, err + _EPS)


def b_nu_prime_one(lam, lam_prime, mu, mu_prime, nu) -> BResult:
    """B with ``nu' = 1``, where ``I(nu, 1; t) = t**nu`` leaves a single 3F2.

    ``B(lam+mu+nu, lam') / (mu B(lam,lam') B(mu,mu')) * 3F2(1-mu', mu, lam+mu+nu; mu+1, lam'+lam+mu+nu; 1)``.
    """
    lam, lam_prime, mu, mu_prime, nu = (
        _positive(n, v) for n, v in zip(("lam", "lam_prime", "mu", "mu_prime", "nu"), (lam, lam_prime, mu, mu_prime, nu))
    )
    norm = math.exp(-log_beta(lam, lam_prime) - log_beta(mu, mu_prime))
    v, e = _beta_3f2(mu_prime, mu, lam + mu + nu, lam_prime)
    return _guarded(norm * v, MethodTag.NU_PRIME_ONE, norm * e)


# ---------------------------------------------------------------------------
# Closed forms


def _sym_term(mu: float, nu: float) -> float:
    """``(mu+nu) B(mu+nu, mu+nu+1) / (mu nu B(mu, mu+1) B(nu, nu+1))``."""
    s = mu + nu
    return math.exp(math.log(s) + log_beta(s, s + 1) - math.log(mu * nu) - log_beta(mu, mu + 1) - log_beta(nu, nu + 1))


def mean_max_iid(mu, nu) -> float:
    """E[max(Y, Z)] for two independent Beta(mu, nu) variables."""
    mu, nu = _positive("mu", mu), _positive("nu", nu)
    ratio = math.exp(log_beta(2 * mu, 2 * nu) - 2 * log_beta(mu, nu))
    return mu / (mu + nu) + 2 * ratio / (mu + nu)


def mean_max_symmetric(mu, nu) -> float:
    """E[max(Y, Z)] for ``Y ~ Beta(mu, mu)`` and ``Z ~ Beta(nu, nu)``."""
    mu, nu = _positive("mu", mu), _positive("nu", nu)
    return 0.5 + _sym_term(mu, nu) / 4


def b_case1(mu, nu) -> float:
    """B(1, 1, mu, mu, nu, nu): a uniform beats two symmetric beta variables."""
    mu, nu = _positive("mu", mu), _positive("nu", nu)
    return 0.5 - _sym_term(mu, nu) / 4


def b_case2(mu, nu) -> float:
    """B(1, 1, mu, mu+1, nu, nu+1)."""
    mu, nu = _positive("mu", mu), _positive("nu", nu)
    s = mu + nu
    lead = (4 * mu * nu + 3 * s + 2) / (2 * (2 * mu + 1) * (2 * nu + 1))
    tail = math.exp(
        math.log(s) + log_beta(s + 1, s + 2) - math.log(mu * nu) - log_beta(mu, mu + 1) - log_beta(nu, nu + 1)
    )
    return lead - tail


def b_case3(mu, mu_prime) -> float:
    """B(1, 1, mu, mu', mu, mu'): a uniform beats two i.i.d. Beta(mu, mu') variables."""
    mu, mu_prime = _positive("mu", mu), _positive("mu_prime", mu_prime)
    ratio = math.exp(log_beta(2 * mu, 2 * mu_prime) - 2 * log_beta(mu, mu_prime))
    return (mu_prime - 2 * ratio) / (mu + mu_prime)


def b_case4(lam, lam_prime, mu) -> float:
    """B(lam, lam', mu, 1/2, mu, 1/2) through a single non-terminating 4F3.

    ``B(lam+2mu, lam') / (mu^2 B(lam,lam') B(mu,1/2)^2)
    * 4F3(1, mu+1/2, 2mu, lam+2mu; mu+1, 2mu+1, lam+lam'+2mu; 1)``; the 4F3
    has convergence margin ``lam' + 1/2``.
    """
    lam, lam_prime, mu = _positive("lam", lam), _positive("lam_prime", lam_prime), _positive("mu", mu)
    scale = math.exp(log_beta(lam + 2 * mu, lam_prime) - 2 * math.log(mu) - log_beta(lam, lam_prime) - 2 * log_beta(mu, 0.5))
    f = pfq(PFQSpec([1.0, mu + 0.5, 2 * mu, lam + 2 * mu], [mu + 1.0, 2 * mu + 1.0, lam + lam_prime + 2 * mu]))
    return scale * f.value


def bb22_moment(lam, mu, mu_prime) -> float:
    """``E[W^lam]`` for W with density ``6 f(t) F(t) (1 - F(t))``, f, F the Beta(mu, mu') pdf and cdf.

    ``E[W^lam] = 6 B(lam+mu, mu') / B(mu, mu') * [P(X >= Y) - B(lam+mu, mu', mu, mu', mu, mu')]``
    with ``X ~ Beta(lam+mu, mu')`` and ``Y ~ Beta(mu, mu')``.  The beta ratio
    converts the ``Beta(lam+mu, mu')`` normalization of the probabilities back
    to the ``Beta(mu, mu')`` one of the density.
    """
    mu, mu_prime = _positive("mu", mu), _positive("mu_prime", mu_prime)
    lam = float(lam)
    if not (math.isfinite(lam) and lam >= 0):
        raise DomainError(f"lambda must be nonnegative and finite, got {lam!r}")
    if lam == 0.0:
        return 1.0
    ratio = math.exp(log_beta(lam + mu, mu_prime) - log_beta(mu, mu_prime))
    p = prob_exceeds(lam + mu, mu_prime, mu, mu_prime)
    b = b_auto(ParamSet(lam + mu, mu_prime, mu, mu_prime, mu, mu_prime)).value
    return 6 * ratio * (p - b)


def _check_index(name: str, m) -> int:
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise DomainError(f"{name} must be a positive integer, got {m!r}")
    return int(m)


def pm_inner(m: int, n: int) -> Fraction:
    """``<p_m, p_n> = 1/2 - C(m+n, m)^2 / (4 C(2m+2n, 2m))`` exactly.

    ``p_m(t) = I(m, m; t)``, so the inner product over [0, 1] is B(1,1,m,m,n,n).
    """
    m, n = _check_index("m", m), _check_index("n", n)
    return Fraction(1, 2) - Fraction(comb(m + n, m) ** 2, 4 * comb(2 * m + 2 * n, 2 * m))


def pm_derivative_norms(m: int) -> tuple[Fraction, int]:
    """``(||p_m'||^2, ||p_m^(m)||^2)`` as exact numbers.

    ``||p_m'||^2 = B(2m-1, 2m-1) / B(m, m)^2`` and
    ``||p_m^(m)||^2 = (2m-2)! (2m-1)! / (m-1)!^2``.
    """
    m = _check_index("m", m)

    def beta_int(a: int, b: int) -> Fraction:
        return Fraction(factorial(a - 1) * factorial(b - 1), factorial(a + b - 1))

    first = beta_int(2 * m - 1, 2 * m - 1) / beta_int(m, m) ** 2
    second = factorial(2 * m - 2) * factorial(2 * m - 1) // factorial(m - 1) ** 2
    return first, second


# ---------------------------------------------------------------------------
# Dispatcher


@dataclass(frozen=True)
class DispatchPolicy:
    """Which routes :func:`b_auto` may use.

    ``exact`` selects exact rational arithmetic for integer parameter sets.
    Routes whose error estimate exceeds ``max_error`` are abandoned in favour
    of the next candidate; quadrature is the last resort.
    """

    exact: bool = False
    special_cases: bool = True
    single_3f2: bool = True
    terminating_series: bool = True
    kdf: bool = True
    single_series: bool = True
    quadrature_fallback: bool = True
    quadrature_tol: float = 1e-12
    max_error: float = 1e-10


def _canonical(p: ParamSet) -> ParamSet:
    # the loser pairs commute; fixing their order makes b_auto exactly swap-symmetric
    if (p.nu, p.nu_prime) < (p.mu, p.mu_prime):
        return p.swapped()
    return p


def _is_int(x: float) -> bool:
    return float(x).is_integer()


def _candidates(p: ParamSet, policy: DispatchPolicy):
    lam, lam_p, mu, mu_p, nu, nu_p = p.as_tuple()
    if policy.exact and all(_is_int(v) for v in p.as_tuple()):
        from .combinatorics import IntParamSet, b_exact_rational

        def exact():
            q = b_exact_rational(IntParamSet(*(int(v) for v in p.as_tuple())))
            return BResult(float(q), MethodTag.EXACT_RATIONAL, 0.0, {"rational": q})

        yield exact
    if policy.special_cases and lam == 1.0 and lam_p == 1.0:
        if mu == mu_p and nu == nu_p:
            yield lambda: BResult(b_case1(mu, nu), MethodTag.SPECIAL_CASE_1, 16 * _EPS)
        if mu_p == mu + 1.0 and nu_p == nu + 1.0:
            yield lambda: BResult(b_case2(mu, nu), MethodTag.SPECIAL_CASE_2, 16 * _EPS)
        if mu == nu and mu_p == nu_p:
            yield lambda: BResult(b_case3(mu, mu_p), MethodTag.SPECIAL_CASE_3, 16 * _EPS)
    if policy.special_cases and mu == nu and mu_p == 0.5 and nu_p == 0.5:
        yield lambda: BResult(b_case4(lam, lam_p, mu), MethodTag.SPECIAL_CASE_4, 1e-13)
    if policy.single_3f2:
        if lam_p == 1.0:
            yield lambda: b_lambda_prime_one(lam, mu, mu_p, nu, nu_p)
        if nu_p == 1.0:
            yield lambda: b_nu_prime_one(lam, lam_p, mu, mu_p, nu)
        elif mu_p == 1.0:
            yield lambda: b_nu_prime_one(lam, lam_p, nu, nu_p, mu)
    if policy.terminating_series and _is_int(mu_p) and _is_int(nu_p):
        yield lambda: b_series_4f3(p if mu_p <= nu_p else p.swapped())
    if policy.kdf:
        yield lambda: b_general(p)
    if policy.single_series and _is_int(lam_p):
        # a finite sum of lam' terms whose inner sums have terms of one sign where the double series cancels;
        # for other lam' the extrapolated sum costs far more than quadrature
        yield lambda: b_series_c(p)


def b_auto(p: ParamSet, policy: DispatchPolicy | None = None) -> BResult:
    """Evaluate B by the cheapest applicable route.

    Special-case closed forms (matched by exact equality of the supplied
    values), then single-3F2 forms, then terminating series, then the
    double-series closed form, then the k-indexed single series; quadrature
    is used if all of these fail or report an error above ``policy.max_error``.  The route taken is recorded
    in ``method`` and any abandoned routes in ``diagnostics["rejected"]``.
    """
    policy = policy or DispatchPolicy()
    q = _canonical(p)
    rejected = []
    for route in _candidates(q, policy):
        try:
            result = route()
        except (SeriesNonConvergence, PoleError, RangeError) as exc:
            rejected.append(f"{type(exc).__name__}: {exc}")
            continue
        if result.abs_error_estimate <= policy.max_error:
            if rejected:
                result = replace(result, diagnostics={**result.diagnostics, "rejected": rejected})
            return _guarded(result.value, result.method, result.abs_error_estimate, result.diagnostics)
        rejected.append(f"{result.method.value}: error estimate {result.abs_error_estimate:.3g}")
    if not policy.quadrature_fallback:
        raise SeriesNonConvergence("no route met the error target: " + "; ".join(rejected))
    from .oracles import b_quadrature

    quad = b_quadrature(q, policy.quadrature_tol)
    return _guarded(
        quad.value, MethodTag.QUADRATURE, quad.abs_error_estimate, {"evaluations": quad.evaluations, "rejected": rejected}
    )


def b_value(lam, lam_prime, mu, mu_prime, nu, nu_prime) -> float:
    """Shorthand for ``b_auto(ParamSet(...)).value``."""
    return b_auto(ParamSet(lam, lam_prime, mu, mu_prime, nu, nu_prime)).value


__all__ = [
    "BResult", "DispatchPolicy", "MethodTag", "ParamSet", "RANGE_EPS",
    "b_auto", "b_case1", "b_case2", "b_case3", "b_case4", "b_general", "b_lambda_prime_one", "b_nu_prime_one",
    "b_series_4f3", "b_series_c", "b_value", "bb22_moment", "c_function", "mean_max_iid",
    "mean_max_symmetric", "moment_max", "pm_derivative_norms", "pm_inner", "prob_exceeds", "prob_exceeds_with_error",
]
