"""Generalized hypergeometric series, Kampe de Feriet double series, and three
closed-form 3F2(1) summations (contiguous Whipple and Dixon).

Series are summed by the multiplicative term recurrence, a chunk of terms at a
time with numpy.  For ``p = q + 1`` at unit argument the terms only decay like
``k**(-1-s)``; once past the parameters the remaining tail is added from its
asymptotic expansion in ``1/K`` (see :func:`_tail_factor`), and the result is
accepted when doubling ``K`` no longer changes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import zeta

from .errors import ConstraintError, PoleError, SeriesDivergence, SeriesNonConvergence
from .special_core import gamma_ratio, nonpositive_integer

TOL_REL = 1e-15
MAX_TERMS = 1_000_000
MAX_CELLS = 4_000_000
CONSTRAINT_TOL = 1e-9

_EPS = np.finfo(float).eps
_CHUNK = 256
_TAIL_ORDER = 24
_RESCALE = 1e200


@dataclass(frozen=True)
class PFQSpec:
    """Parameters of ``pFq(numerator; denominator; argument)``."""

    numerator_params: tuple
    denominator_params: tuple
    argument: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "numerator_params", tuple(float(a) for a in self.numerator_params))
        object.__setattr__(self, "denominator_params", tuple(float(b) for b in self.denominator_params))
        if not (math.isfinite(self.argument) and abs(self.argument) <= 1.0):
            raise ValueError(f"argument must satisfy |z| <= 1, got {self.argument!r}")

    @property
    def margin(self) -> float:
        """``sum(denominators) - sum(numerators)``, the unit-argument convergence margin."""
        return sum(self.denominator_params) - sum(self.numerator_params)


@dataclass(frozen=True)
class KdFSpec:
    """Kampe de Feriet function parameters.

    The term of index ``(m, n)`` is
    ``(a)_{m+n} (c)_m (f)_n / ((b)_{m+n} (d)_m (g)_n) * x**m y**n / (m! n!)``
    where each Pochhammer factor is a product over its list.
    """

    a_list: tuple = ()
    b_list: tuple = ()
    c_list: tuple = ()
    d_list: tuple = ()
    f_list: tuple = ()
    g_list: tuple = ()
    x: float = 1.0
    y: float = 1.0

    def __post_init__(self):
        for name in ("a_list", "b_list", "c_list", "d_list", "f_list", "g_list"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))


@dataclass(frozen=True)
class SeriesValue:
    value: float
    abs_error_estimate: float
    terms_used: int
    terminated: bool
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "abs_error_estimate", float(self.abs_error_estimate))
        if self.terminated and self.abs_error_estimate != 0.0:
            raise ValueError("a terminated series carries no truncation error")


def _snap_numerators(params) -> tuple[list[float], int | None]:
    """Snap near-integer nonpositive numerators; return them and the last nonzero index."""
    out = []
    last = None
    for a in params:
        n = nonpositive_integer(a)
        if n is not None:
            a = float(n)
            last = -n if last is None else min(last, -n)
        out.append(a)
    return out, last


def _check_poles(denominators, last: int | None) -> list[float]:
    out = []
    for b in denominators:
        n = nonpositive_integer(b)
        if n is not None:
            b = float(n)
            # (b)_k vanishes from k = -b + 1 on; the series must stop by k = -b.
            if last is None or last > -n:
                raise PoleError(f"denominator parameter {b} is reached before the series terminates")
        out.append(b)
    return out


def _ratios(a: np.ndarray, b: np.ndarray, z: float, ks: np.ndarray) -> np.ndarray:
    num = np.prod(a[:, None] + ks[None, :], axis=0) if a.size else np.ones_like(ks)
    den = np.prod(b[:, None] + ks[None, :], axis=0) if b.size else np.ones_like(ks)
    return num / (den * (ks + 1.0)) * z


def _terminating_sum(a, b, z, last: int) -> tuple[float, int, float]:
    """Sum terms 0..last as finitely many products; also returns the sum of |terms|."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    total = 1.0
    abs_total = 1.0
    term = 1.0
    scale = 0.0
    k = 0
    while k < last:
        ks = np.arange(k, min(k + _CHUNK, last), dtype=float)
        terms = term * np.cumprod(_ratios(a, b, z, ks))
        if not np.all(np.isfinite(terms)) or np.max(np.abs(terms)) > _RESCALE:
            # rescale before the chunk overflows; fall back to one term at a time
            if abs(term) > 1.0:
                scale += math.log(abs(term))
                total /= abs(term)
                abs_total /= abs(term)
                term = math.copysign(1.0, term)
            r = float(_ratios(a, b, z, ks[:1])[0])
            term *= r
            total += term
            abs_total += abs(term)
            k += 1
            continue
        total += float(np.sum(terms))
        abs_total += float(np.sum(np.abs(terms)))
        term = float(terms[-1])
        k += ks.size
    factor = math.exp(scale)
    return total * factor, last + 1, abs_total * factor


def _tail_factors(num, den, nterms: int = _TAIL_ORDER) -> np.ndarray:
    """Rows of coefficients phi_j with sum_{k>=K} t_k ~ t_K * sum_j phi_j K**(1-j).

    Valid for p = q + 1 at z = 1; ``num`` and ``den`` hold one parameter set
    per row.  With x = 1/K the factor G(x) = x F(1/x) satisfies
    G(x) = x + sigma(x) G(x/(1+x)), where sigma(x) = (1+x) times the term
    ratio t_{K+1}/t_K written in x.  Matching powers of x gives a triangular
    recursion for phi.
    """
    num = np.atleast_2d(np.asarray(num, dtype=float))
    den = np.atleast_2d(np.asarray(den, dtype=float))
    rows = num.shape[0]
    deg = nterms + 2
    poly = np.zeros((rows, deg))
    poly[:, 0] = 1.0
    for i in range(num.shape[1]):
        poly[:, 1:] = poly[:, 1:] + num[:, i:i + 1] * poly[:, :-1]
    for bj in list(den.T) + [np.ones(rows)]:
        for i in range(1, deg):
            poly[:, i] -= bj * poly[:, i - 1]
    sigma = poly.copy()
    sigma[:, 1:] += poly[:, :-1]
    s = -sigma[:, 1]
    # expansion of (1+x)**(-j):  M[v, j] = (-1)**(v-j) C(v-1, v-j)
    mat = np.zeros((deg, nterms))
    for v in range(1, deg):
        for j in range(1, min(v, nterms - 1) + 1):
            mat[v, j] = (-1) ** (v - j) * math.comb(v - 1, v - j)
    phi = np.zeros((rows, nterms))
    phi[:, 0] = 1.0 / s
    for big_n in range(2, nterms + 1):
        h = phi[:, 1:big_n - 1] @ mat[:big_n + 1, 1:big_n - 1].T
        h[:, 0] += phi[:, 0]
        rest = np.sum(sigma[:, :big_n + 1] * h[:, ::-1], axis=1)
        phi[:, big_n - 1] = rest / (big_n - 1 + s)
    return phi


def _tail_sums(phi: np.ndarray, t_k, k):
    """Asymptotic tails t_K * F(K) for each row; returns (tails, truncation errors).

    The expansion is cut before its terms start to grow.
    """
    phi = np.atleast_2d(phi)
    t_k = np.atleast_1d(np.asarray(t_k, dtype=float))
    k = np.atleast_1d(np.asarray(k, dtype=float))
    powers = k[:, None] ** (1.0 - np.arange(phi.shape[1]))[None, :]
    terms = phi * powers
    mag = np.abs(terms)
    growing = np.zeros(mag.shape, dtype=bool)
    growing[:, 1:] = mag[:, 1:] > mag[:, :-1]
    keep = ~np.logical_or.accumulate(growing, axis=1)
    total = np.sum(np.where(keep, terms, 0.0), axis=1)
    last = np.max(np.where(keep, np.arange(phi.shape[1])[None, :], 0), axis=1)
    err = np.abs(t_k) * mag[np.arange(mag.shape[0]), last]
    return t_k * total, err


def pfq(spec: PFQSpec, tol_rel: float = TOL_REL, max_terms: int = MAX_TERMS) -> SeriesValue:
    """Evaluate ``pFq(a; b; z)`` by direct summation.

    Terminating series (a numerator within 1e-9 of a nonpositive integer) are
    summed exactly to their last nonzero term.  Otherwise terms are added until
    three consecutive terms fall below ``tol_rel * |sum|``; at ``z = 1`` with
    ``p = q + 1`` the asymptotic tail is added instead and the sum is accepted
    once it is stable under doubling the cutoff.

    Raises
    ------
    PoleError
        A denominator parameter is a nonpositive integer reached before termination.
    SeriesNonConvergence
        ``p = q + 1``, ``z = 1`` and the margin is not positive, or the budget ran out.
    SeriesDivergence
        ``p > q + 1`` and the series does not terminate.
    """
    z = float(spec.argument)
    a, last = _snap_numerators(spec.numerator_params)
    b = _check_poles(spec.denominator_params, last)
    if z == 0.0:
        return SeriesValue(1.0, 0.0, 1, True)
    if last is not None:
        if last + 1 > max_terms:
            raise SeriesNonConvergence(f"terminating series needs {last + 1} terms, budget {max_terms}")
        value, used, abs_sum = _terminating_sum(a, b, z, last)
        return SeriesValue(value, 0.0, used, True, {"abs_sum": abs_sum})
    p, q = len(a), len(b)
    if p > q + 1:
        raise SeriesDivergence(f"{p}F{q} with no terminating numerator diverges")
    unit_log = p == q + 1 and abs(z) == 1.0
    s = sum(b) - sum(a)
    if unit_log and z == 1.0 and s <= 0:
        raise SeriesNonConvergence(f"{p}F{q}(1) has margin s = {s:g} <= 0")
    if unit_log and z == -1.0 and s <= -1:
        raise SeriesNonConvergence(f"{p}F{q}(-1) has margin s = {s:g} <= -1")
    return _sum_infinite(a, b, z, s, tol_rel, max_terms, accelerate=unit_log and z == 1.0)


def _sum_infinite(a, b, z, s, tol_rel, max_terms, accelerate) -> SeriesValue:
    aa = np.asarray(a, dtype=float)
    bb = np.asarray(b, dtype=float)
    guard = int(max([abs(v) for v in a + b] + [0.0])) + 2
    k0 = 4 * guard + 32
    phi = _tail_factors(a, b) if accelerate else None
    total = 1.0
    abs_total = 1.0
    term = 1.0
    k = 0  # index of `term`, which is already in `total`
    small_run = 0
    checkpoint = k0
    previous = None
    last_diff = None
    while True:
        if k + 1 >= max_terms:
            raise SeriesNonConvergence(f"series did not converge within {max_terms} terms")
        n = min(_CHUNK, max_terms - k - 1)
        if accelerate:
            n = min(n, checkpoint - k)
        ks = np.arange(k, k + n, dtype=float)
        terms = term * np.cumprod(_ratios(aa, bb, z, ks))
        if not np.all(np.isfinite(terms)):
            raise SeriesNonConvergence("term recurrence overflowed")
        partial = total + np.cumsum(terms)
        idx = np.arange(k + 1, k + n + 1)
        if accelerate:
            # remaining tail is about |t| k / s once past the parameters
            negligible = (idx > guard) & (np.abs(terms) * (idx + 1) / s < 0.1 * _EPS * np.abs(partial))
            hit = np.flatnonzero(negligible)
            if hit.size:
                j = hit[0]
                total = float(partial[j])
                est = abs(float(terms[j])) * (idx[j] + 1) / s
                abs_total += float(np.sum(np.abs(terms[: j + 1])))
                return SeriesValue(total, est + 4 * _EPS * abs_total, int(idx[j]) + 1, False, {"abs_sum": abs_total})
        else:
            small = (idx > guard) & (np.abs(terms) < tol_rel * np.abs(partial))
            ext = np.concatenate([np.ones(small_run, dtype=bool), small])
            if ext.size >= 3:
                win = ext[:-2] & ext[1:-1] & ext[2:]
                hit = np.flatnonzero(win)
                if hit.size:
                    j = hit[0] + 2 - small_run
                    total = float(partial[j])
                    nxt = float(terms[j + 1]) if j + 1 < n else float(terms[j] * _ratios(aa, bb, z, np.array([float(idx[j])]))[0])
                    abs_total += float(np.sum(np.abs(terms[: j + 1])))
                    return SeriesValue(total, 10.0 * abs(nxt), int(idx[j]) + 1, False, {"abs_sum": abs_total})
            if small.all():
                small_run = min(2, small_run + n)
            else:
                small_run = min(2, int(np.argmin(small[::-1])))
        total = float(partial[-1])
        abs_total += float(np.sum(np.abs(terms)))
        term = float(terms[-1])
        k += n
        if accelerate and k == checkpoint:
            nxt = term * float(_ratios(aa, bb, z, np.array([float(k)]))[0])
            tail, trunc = _tail_sums(phi, nxt, k + 1)
            tail, trunc = float(tail[0]), float(trunc[0])
            estimate = total + tail
            if previous is not None:
                diff = abs(estimate - previous)
                noise = 8 * _EPS * abs_total
                if diff <= max(tol_rel * 10 * abs(estimate), noise):
                    return SeriesValue(
                        estimate, diff + trunc + noise, k + 1, False, {"tail": tail, "cutoff": k + 1, "abs_sum": abs_total}
                    )
            previous = estimate
            checkpoint *= 2


def rounding_error(value: SeriesValue) -> float:
    """Rounding error bound from the magnitude of the summed terms."""
    return 8 * _EPS * value.diagnostics.get("abs_sum", abs(value.value))


def pfq_exact(numerator: Sequence, denominator: Sequence, argument=1) -> Fraction:
    """Exact value of a terminating ``pFq`` with rational parameters."""
    num = [Fraction(v) for v in numerator]
    den = [Fraction(v) for v in denominator]
    z = Fraction(argument)
    last = None
    for v in num:
        if v.denominator == 1 and v <= 0:
            last = -int(v) if last is None else min(last, -int(v))
    if last is None:
        raise SeriesNonConvergence("pfq_exact needs a nonpositive-integer numerator parameter")
    for v in den:
        if v.denominator == 1 and v <= 0 and last > -v:
            raise PoleError(f"denominator parameter {v} is reached before the series terminates")
    total = Fraction(1)
    term = Fraction(1)
    for k in range(last):
        for v in num:
            term *= v + k
        for v in den:
            term /= v + k
        term *= z / (k + 1)
        total += term
    return total


# ---------------------------------------------------------------------------
# Kampe de Feriet double series


def _coef_sequence(c, d, x, count: int) -> np.ndarray:
    """(c)_m / (d)_m * x**m / m! for m < count (products over the lists)."""
    out = np.empty(count)
    out[0] = 1.0
    if count > 1:
        ks = np.arange(count - 1, dtype=float)
        out[1:] = np.cumprod(_ratios(np.asarray(c, float), np.asarray(d, float), x, ks))
    return out


def _coupled_sequence(a, b, count: int) -> np.ndarray:
    out = np.empty(count)
    out[0] = 1.0
    if count > 1:
        ks = np.arange(count - 1, dtype=float)
        num = np.prod(np.asarray(a, float)[:, None] + ks[None, :], axis=0) if len(a) else np.ones_like(ks)
        den = np.prod(np.asarray(b, float)[:, None] + ks[None, :], axis=0) if len(b) else np.ones_like(ks)
        out[1:] = np.cumprod(num / den)
    return out


def _kdf_diagonal(spec: KdFSpec, a, c, f, last_a, last_c, last_f, tol_rel, max_cells) -> SeriesValue:
    b, d, g = spec.b_list, spec.d_list, spec.g_list
    guard = int(max([abs(v) for v in a + list(b) + c + list(d) + f + list(g)] + [0.0])) + 2
    size = 64
    u = _coef_sequence(c, d, spec.x, size)
    v = _coef_sequence(f, g, spec.y, size)
    A = _coupled_sequence(a, b, size)
    total = 0.0
    abs_sum = 0.0
    cells = 0
    small_run = 0
    s = 0
    while True:
        if (last_a is not None and s > last_a) or (last_c is not None and last_f is not None and s > last_c + last_f):
            return SeriesValue(total, 0.0, cells, True, {"order": "diagonal", "diagonals": s, "abs_sum": abs_sum})
        if s >= size:
            size *= 2
            u = _coef_sequence(c, d, spec.x, size)
            v = _coef_sequence(f, g, spec.y, size)
            A = _coupled_sequence(a, b, size)
        lo = 0 if last_f is None else max(0, s - last_f)
        hi = s if last_c is None else min(s, last_c)
        cells += max(0, hi - lo + 1)
        if cells > max_cells:
            raise SeriesNonConvergence(f"KdF diagonal sums did not decay within {max_cells} cells")
        if hi >= lo:
            us, vs = u[lo:hi + 1], v[s - hi:s - lo + 1][::-1]
            diag = A[s] * float(np.dot(us, vs))
            abs_sum += abs(A[s]) * float(np.dot(np.abs(us), np.abs(vs)))
        else:
            diag = 0.0
        if not math.isfinite(diag):
            raise SeriesNonConvergence("KdF diagonal sum overflowed")
        total += diag
        if s > guard and abs(diag) < tol_rel * abs(total):
            small_run += 1
            if small_run == 3:
                return SeriesValue(
                    total, 10.0 * abs(diag), cells, False, {"order": "diagonal", "diagonals": s + 1, "abs_sum": abs_sum}
                )
        else:
            small_run = 0
        s += 1


def _fit_power_tail(terms: np.ndarray, start: int, decay: float, offsets: Sequence[float], per_family: int = 4):
    """Sum of the terms beyond ``len(terms) + start`` from a power-law fit.

    ``terms[i]`` is the term of index ``start + i``.  The terms are modelled as
    ``sum_i c_i k**(-gamma_i)`` with gamma from ``decay + offset + j``; the fit
    uses the last half of the available terms, and each fitted power is summed
    to infinity with the Hurwitz zeta function.
    """
    n_total = terms.size
    cut = start + n_total
    lo = n_total // 2
    ks = np.arange(start + lo, cut, dtype=float)
    y = terms[lo:]
    gammas = sorted({round(decay + off + j, 12) for off in offsets for j in range(per_family)})
    basis = np.stack([(ks / cut) ** (-gm) for gm in gammas], axis=1)
    weight = (ks / cut) ** decay
    coef, *_ = np.linalg.lstsq(basis * weight[:, None], y * weight, rcond=None)
    fitted = basis @ coef
    resid = float(np.max(np.abs(fitted - y) * weight))
    tail = sum(cf * cut ** gm * zeta(gm, cut) for cf, gm in zip(coef, gammas))
    return float(tail), resid * cut


def _unit_lines(a, ic, b, idl, ks: np.ndarray):
    """Inner line sums sum_j (a+k)_j (ic)_j / ((b+k)_j (idl)_j j!) at unit argument.

    One row per shift ``k``; rows are summed together as a 2-D array, with the
    asymptotic tail added at cutoffs J and 2J.  Returns values, error
    estimates, the number of terms generated and the sums of absolute terms.
    Rows whose two estimates disagree are handed back as NaN for the scalar
    path.
    """
    ic_snapped, last = _snap_numerators(ic)
    num = np.concatenate([np.add.outer(ks, a), np.broadcast_to(np.asarray(ic_snapped, float), (ks.size, len(ic)))], axis=1)
    den = np.concatenate([np.add.outer(ks, b), np.broadcast_to(np.asarray(idl, float), (ks.size, len(idl)))], axis=1)
    if last is not None:
        width = last
    else:
        width = 2 * (4 * int(np.max(np.abs(num)) + np.max(np.abs(den)) / 2 + 2) + 32)
    js = np.arange(width, dtype=float)
    ratio = np.prod(num[:, :, None] + js[None, None, :], axis=1)
    ratio /= np.prod(den[:, :, None] + js[None, None, :], axis=1) * (js + 1.0)[None, :]
    terms = np.concatenate([np.ones((ks.size, 1)), np.cumprod(ratio, axis=1)], axis=1)
    cells = int(terms.size)
    abs_sums = np.sum(np.abs(terms), axis=1)
    if last is not None:
        return np.sum(terms, axis=1), np.zeros(ks.size), cells, abs_sums
    half = width // 2
    phi = _tail_factors(num, den)
    tail1, tr1 = _tail_sums(phi, terms[:, half], np.full(ks.size, float(half)))
    tail2, tr2 = _tail_sums(phi, terms[:, width], np.full(ks.size, float(width)))
    est1 = np.sum(terms[:, :half], axis=1) + tail1
    est2 = np.sum(terms[:, :width], axis=1) + tail2
    noise = 8 * _EPS * abs_sums
    diff = np.abs(est2 - est1)
    ok = np.isfinite(est2) & (diff <= np.maximum(1e-14 * np.abs(est2), noise))
    vals = np.where(ok, est2, np.nan)
    return vals, diff + tr2 + noise, cells, abs_sums


def _line_values(a, ic, b, idl, y, ks: np.ndarray):
    batchable = (
        y == 1.0
        and len(a) == len(b)
        and len(a) + len(ic) == len(b) + len(idl) + 1
        and all(v > 0 for v in list(a) + list(b) + list(idl))
    )
    vals = np.empty(ks.size)
    errs = np.zeros(ks.size)
    abs_sums = np.zeros(ks.size)
    cells = 0
    todo = np.ones(ks.size, dtype=bool)
    if batchable:
        for lo in range(0, ks.size, 32):
            sl = slice(lo, lo + 32)
            v, e, c, m = _unit_lines(a, ic, b, idl, ks[sl])
            vals[sl], errs[sl], abs_sums[sl] = v, e, m
            cells += c
        todo = np.isnan(vals)
    for i in np.flatnonzero(todo):
        k = float(ks[i])
        line = pfq(PFQSpec([x + k for x in a] + list(ic), [x + k for x in b] + list(idl), y))
        vals[i], errs[i] = line.value, line.abs_error_estimate + rounding_error(line)
        abs_sums[i] = line.diagnostics.get("abs_sum", abs(line.value))
        cells += line.terms_used
    return vals, errs, cells, abs_sums


def _kdf_outer(spec: KdFSpec, a, c, f, last_a, last_c, last_f, rows: bool, tol_rel, max_cells) -> SeriesValue:
    """Sum over one index, each fixed-index line of the other evaluated as a pFq."""
    b, d, g = list(spec.b_list), list(spec.d_list), list(spec.g_list)
    if rows:
        oc, od, ox, ic, idl, iy, last_o = c, d, spec.x, f, g, spec.y, last_c
    else:
        oc, od, ox, ic, idl, iy, last_o = f, g, spec.y, c, d, spec.x, last_f
    label = "rows" if rows else "columns"
    if last_a is not None:
        last_o = last_a if last_o is None else min(last_o, last_a)
    if last_o is None:
        if not (len(oc) == len(od) + 1 and len(ic) == len(idl) + 1 and len(a) == len(b) and ox == 1.0 and iy == 1.0):
            raise SeriesNonConvergence("line summation needs a terminating outer index or the unit-argument pattern")
        decay = (sum(od) + 1.0 - sum(oc)) + (sum(b) - sum(a))
        offsets = [0.0, sum(idl) - sum(ic)]
        if nonpositive_integer(-offsets[1]) is not None:
            offsets = [0.0]

    def outer_coefs(count):
        ks = np.arange(count - 1, dtype=float)
        return np.concatenate([[1.0], np.cumprod(_ratios(np.asarray(oc + a, float), np.asarray(od + b, float), ox, ks))])

    if last_o is not None:
        ks = np.arange(last_o + 1, dtype=float)
        vals, errs, cells, abs_sums = _line_values(a, ic, b, idl, iy, ks)
        coefs = outer_coefs(last_o + 1)
        err = float(np.sum(np.abs(coefs) * errs))
        abs_sum = float(np.sum(np.abs(coefs) * abs_sums))
        return SeriesValue(
            math.fsum(coefs * vals), err, cells, err == 0.0, {"order": label, "lines": last_o + 1, "abs_sum": abs_sum}
        )

    def block(lo, hi):
        ks = np.arange(lo, hi, dtype=float)
        vals, errs, used, _ = _line_values(a, ic, b, idl, iy, ks)
        coefs = outer_coefs(hi)[lo:]
        return coefs * vals, np.abs(coefs) * errs, used

    try:
        result = extrapolated_sum(block, decay, offsets, max_cost=max_cells)
    except SeriesNonConvergence as exc:
        raise SeriesNonConvergence(f"KdF line sums: {exc}") from None
    diag = dict(result.diagnostics, order=label)
    return SeriesValue(result.value, result.abs_error_estimate, result.terms_used, False, diag)


def extrapolated_sum(block, decay: float, offsets: Sequence[float], *, start_window: int = 64,
                     rel_tol: float = 1e-13, max_cost: int = MAX_CELLS,
                     plateau_tol: float | None = None) -> SeriesValue:
    """Sum a slowly converging series whose terms follow known power laws.

    Parameters
    ----------
    block : callable
        ``block(lo, hi)`` returns ``(terms, term_errors, cost)`` for the term
        indices ``lo <= k < hi``.
    decay : float
        Leading decay exponent of the terms.
    offsets : sequence of float
        Exponent offsets of further power-law families; each family also has
        integer-shifted corrections.
    plateau_tol : float, optional
        If set, also stop when doubling the window no longer halves the change
        between successive sums and that change is below ``plateau_tol``
        relative.  The error estimate is then ten times the larger of the last
        two changes.

    The window doubles until two successive extrapolated sums agree to
    ``rel_tol`` (or to the rounding noise of the partial sum).
    """
    window = start_window
    terms = np.empty(0)
    errs = np.empty(0)
    cost = 0
    previous = None
    last_diff = None
    while True:
        t, e, c = block(terms.size, window)
        terms = np.concatenate([terms, t])
        errs = np.concatenate([errs, e])
        cost += c
        if not np.all(np.isfinite(terms)):
            raise SeriesNonConvergence("series terms overflowed")
        tail, resid = _fit_power_tail(terms, 0, decay, offsets)
        estimate = math.fsum(terms) + tail
        if previous is not None:
            diff = abs(estimate - previous)
            # the extrapolation cannot beat the rounding and the errors of the terms themselves
            noise = 64 * _EPS * float(np.sum(np.abs(terms))) + 4 * float(np.sum(errs))
            if diff <= max(rel_tol * abs(estimate), noise):
                err = 10 * diff + float(np.sum(errs)) + resid + 32 * _EPS * float(np.sum(np.abs(terms)))
                return SeriesValue(estimate, err, cost, False, {"lines": window, "tail": tail})
            if (plateau_tol is not None and last_diff is not None and diff > 0.5 * last_diff
                    and diff <= plateau_tol * abs(estimate)):
                # the fit has stopped improving; report the plateau instead of running to the budget
                err = 10 * max(diff, last_diff) + float(np.sum(errs)) + resid + 32 * _EPS * float(np.sum(np.abs(terms)))
                return SeriesValue(estimate, err, cost, False, {"lines": window, "tail": tail, "plateau": True})
            last_diff = diff
        previous = estimate
        window *= 2
        if cost > max_cost:
            raise SeriesNonConvergence(f"did not converge within a cost of {max_cost}")


def kdf(spec: KdFSpec, order: str = "auto", tol_rel: float = TOL_REL, max_cells: int = MAX_CELLS) -> SeriesValue:
    """Evaluate a Kampe de Feriet double series.

    Parameters
    ----------
    spec : KdFSpec
    order : {"auto", "diagonal", "rows", "columns"}
        ``diagonal`` accumulates anti-diagonals ``m + n = s`` in ascending
        order, computing the coupled factor once per diagonal.  ``rows`` sums
        over ``m`` with each fixed-``m`` line evaluated as one pFq (and
        ``columns`` the same over ``n``).  When the outer index does not
        terminate, the outer tail is extrapolated from a power-law fit; this
        needs unit arguments and the ``p = q + 1`` shape in each index.
        ``auto`` prefers a terminating outer index, then the slower-decaying
        index as the inner one, and falls back to diagonals.

    Notes
    -----
    Convergence at ``x = y = 1`` is only established for the pattern used by
    the beta-integral routes; other specs are best effort.
    """
    a, last_a = _snap_numerators(spec.a_list)
    c, last_c = _snap_numerators(spec.c_list)
    f, last_f = _snap_numerators(spec.f_list)
    _check_poles(spec.b_list, last_a if last_a is not None else None)
    _check_poles(spec.d_list, last_c)
    _check_poles(spec.g_list, last_f)
    if order == "diagonal":
        return _kdf_diagonal(spec, a, c, f, last_a, last_c, last_f, tol_rel, max_cells)
    if order == "rows":
        return _kdf_outer(spec, a, c, f, last_a, last_c, last_f, True, tol_rel, max_cells)
    if order == "columns":
        return _kdf_outer(spec, a, c, f, last_a, last_c, last_f, False, tol_rel, max_cells)
    if order != "auto":
        raise ValueError(f"unknown order {order!r}")
    if last_a is not None or (last_c is not None and last_f is not None):
        return _kdf_diagonal(spec, a, c, f, last_a, last_c, last_f, tol_rel, max_cells)
    if last_f is not None:
        return _kdf_outer(spec, a, c, f, last_a, last_c, last_f, False, tol_rel, max_cells)
    if last_c is not None:
        return _kdf_outer(spec, a, c, f, last_a, last_c, last_f, True, tol_rel, max_cells)
    unit = spec.x == 1.0 and spec.y == 1.0 and len(a) == len(spec.b_list)
    if unit and len(c) == len(spec.d_list) + 1 and len(f) == len(spec.g_list) + 1:
        # outer decay grows with the outer margin; put the faster one outside
        rows_margin = sum(spec.d_list) + 1 - sum(c)
        cols_margin = sum(spec.g_list) + 1 - sum(f)
        return _kdf_outer(spec, a, c, f, last_a, last_c, last_f, rows_margin >= cols_margin, tol_rel, max_cells)
    return _kdf_diagonal(spec, a, c, f, last_a, last_c, last_f, tol_rel, max_cells)


# ---------------------------------------------------------------------------
# Closed-form 3F2(1) summations


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConstraintError(message)


def whipple_contiguous_m1_p1(a: float, b: float, c: float, e: float, f: float) -> float:
    """``3F2(a, b, c; e, f; 1)`` when ``a + b = 1`` and ``e + f = 2c``.

    Obtained from two classical Whipple sums by a contiguous relation::

        Gamma(e) Gamma(f) / (4**a (c-1) Gamma(e-a) Gamma(f-a)) * [
            Gamma((e-a+1)/2) Gamma((f-a)/2) / (Gamma((e+a-1)/2) Gamma((f+a)/2))
          + Gamma((f-a+1)/2) Gamma((e-a)/2) / (Gamma((f+a-1)/2) Gamma((e+a)/2)) ]
    """
    _require(abs(a + b - 1.0) <= CONSTRAINT_TOL, f"need a + b = 1, got {a + b!r}")
    _require(abs(e + f - 2.0 * c) <= CONSTRAINT_TOL, f"need e + f = 2c, got e + f - 2c = {e + f - 2 * c!r}")
    if c == 1.0:
        raise PoleError("c = 1 makes the prefactor singular")
    pre = gamma_ratio([e, f], [e - a, f - a]) / (4.0 ** a * (c - 1.0))
    t1 = gamma_ratio([(e - a + 1) / 2, (f - a) / 2], [(e + a - 1) / 2, (f + a) / 2])
    t2 = gamma_ratio([(f - a + 1) / 2, (e - a) / 2], [(f + a - 1) / 2, (e + a) / 2])
    return pre * (t1 + t2)


def whipple_contiguous_0_m1(a: float, b: float, c: float, e: float, f: float) -> float:
    """``3F2(a, b, c; e, f; 1)`` when ``a + b = 0`` and ``e + f = 2c + 1``."""
    _require(abs(a + b) <= CONSTRAINT_TOL, f"need a + b = 0, got {a + b!r}")
    _require(abs(e + f - 2.0 * c - 1.0) <= CONSTRAINT_TOL, f"need e + f = 2c + 1, got {e + f - 2 * c!r}")
    pre = gamma_ratio([e, f], [e - a, f - a]) / 2.0 ** (2 * a + 1)
    t1 = gamma_ratio([(e - a) / 2, (f - a) / 2], [(e + a) / 2, (f + a) / 2])
    t2 = gamma_ratio([(e - a + 1) / 2, (f - a + 1) / 2], [(e + a + 1) / 2, (f + a + 1) / 2])
    return pre * (t1 + t2)


def dixon_contiguous_m1_p1(a: float, b: float, c: float) -> float:
    """``3F2(a, b, c; a - b, a - c + 1; 1)``, a contiguous neighbour of Dixon's sum."""
    e = a - b
    f = a - c + 1.0
    pre = gamma_ratio([e, f], [f - c, f - b]) / 4.0 ** c
    t1 = gamma_ratio([(f - c) / 2, a / 2 - b - c + 1], [(a + 1) / 2, (e - b) / 2])
    t2 = gamma_ratio([(f - c + 1) / 2, a / 2 - b - c + 0.5], [a / 2, (e - b + 1) / 2])
    return pre * (t1 + t2)
