"""Gamma, beta, Pochhammer and regularized incomplete beta functions.

Everything here is a pure function of its inputs.  Rising factorials are
returned as :class:`LogSigned` so that long products can be composed without
overflow; the incomplete beta function uses the classical continued fraction
evaluated with the modified Lentz algorithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError

#: parameters below this are accepted but reported as reduced-accuracy
SMALL_PARAMETER = 1e-3
#: distance from a nonpositive integer at which a parameter is snapped onto it
SNAP_TOL = 1e-9

_POCH_LOOP_MAX = 512
_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAXIT = 20000


@dataclass(frozen=True)
class LogSigned:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign == 0`` encodes an exact zero, in which case ``log_magnitude`` is
    ``-inf`` and carries no information.
    """

    log_magnitude: float
    sign: int

    @classmethod
    def zero(cls) -> "LogSigned":
        return cls(-math.inf, 0)

    @classmethod
    def one(cls) -> "LogSigned":
        return cls(0.0, 1)

    @classmethod
    def from_float(cls, x: float) -> "LogSigned":
        if x == 0:
            return cls.zero()
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __float__(self) -> float:
        return self.value

    def __mul__(self, other) -> "LogSigned":
        if not isinstance(other, LogSigned):
            other = LogSigned.from_float(float(other))
        if self.sign == 0 or other.sign == 0:
            return LogSigned.zero()
        return LogSigned(self.log_magnitude + other.log_magnitude, self.sign * other.sign)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogSigned":
        if not isinstance(other, LogSigned):
            other = LogSigned.from_float(float(other))
        if other.sign == 0:
            raise ZeroDivisionError("division by an exact zero")
        if self.sign == 0:
            return LogSigned.zero()
        return LogSigned(self.log_magnitude - other.log_magnitude, self.sign * other.sign)


def nonpositive_integer(x: float, tol: float = SNAP_TOL) -> int | None:
    """Return ``round(x)`` if ``x`` is within ``tol`` of an integer ``<= 0``, else None."""
    r = round(x)
    if r <= 0 and abs(x - r) <= tol:
        return int(r)
    return None


def positive_integer(x: float, tol: float = SNAP_TOL) -> int | None:
    """Return ``round(x)`` if ``x`` is within ``tol`` of an integer ``>= 1``, else None."""
    r = round(x)
    if r >= 1 and abs(x - r) <= tol:
        return int(r)
    return None


def reduced_accuracy(*params: float) -> bool:
    """True if any shape parameter is small enough to degrade accuracy."""
    return any(p < SMALL_PARAMETER for p in params)


def _check_positive(name: str, x: float) -> None:
    if not (isinstance(x, (int, float, np.floating, np.integer)) and math.isfinite(x) and x > 0):
        raise DomainError(f"{name} must be a positive finite real, got {x!r}")


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for positive finite ``x``."""
    _check_positive("x", x)
    return math.lgamma(x)


def _gamma_sign(x: float) -> int:
    if x > 0:
        return 1
    # Gamma alternates sign between consecutive negative integers.
    return -1 if math.floor(-x) % 2 == 0 else 1


def log_gamma_signed(x: float) -> LogSigned:
    """Gamma(x) as a :class:`LogSigned` for any real x that is not a pole."""
    if nonpositive_integer(x, 1e-12) is not None:
        raise PoleError(f"gamma has a pole at {x!r}")
    return LogSigned(math.lgamma(x), _gamma_sign(x))


def gamma_ratio(numer, denom) -> float:
    """``prod(Gamma(numer)) / prod(Gamma(denom))``.

    A pole in the numerator raises :class:`PoleError`; a pole in the
    denominator makes the ratio exactly zero.
    """
    acc = LogSigned.one()
    for x in numer:
        acc = acc * log_gamma_signed(x)
    for x in denom:
        if nonpositive_integer(x, 1e-12) is not None:
            return 0.0
        acc = acc / log_gamma_signed(x)
    return acc.value


def log_beta(a: float, b: float) -> float:
    _check_positive("a", a)
    _check_positive("b", b)
    a, b = min(a, b), max(a, b)
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def beta_fn(a: float, b: float) -> float:
    """The complete beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    _check_positive("a", a)
    _check_positive("b", b)
    a, b = min(a, b), max(a, b)
    if a + b < 170.0:
        return math.gamma(a) * math.gamma(b) / math.gamma(a + b)
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def pochhammer(a: float, k: int) -> LogSigned:
    """Rising factorial ``(a)_k = a (a+1) ... (a+k-1)`` as a :class:`LogSigned`.

    Parameters within ``SNAP_TOL`` of a nonpositive integer are treated as that
    integer, so ``(a)_k`` is an exact zero once ``k`` exceeds ``-a``.
    """
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise DomainError(f"k must be a nonnegative integer, got {k!r}")
    k = int(k)
    n = nonpositive_integer(a)
    if n is not None:
        if k > -n:
            return LogSigned.zero()
        a = float(n)
    if k <= _POCH_LOOP_MAX:
        acc = LogSigned.one()
        for i in range(k):
            acc = acc * (a + i)
        return acc
    if n is not None:
        m = -n
        return LogSigned(math.lgamma(m + 1) - math.lgamma(m - k + 1), -1 if k % 2 else 1)
    log_mag = math.lgamma(a + k) - math.lgamma(a)
    negatives = 0 if a > 0 else min(k, math.ceil(-a))
    return LogSigned(log_mag, -1 if negatives % 2 else 1)


def _lentz_betacf(a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Continued fraction for I_x(a, b) (modified Lentz), vectorized over x."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
    d = 1.0 / d
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_TINY, _CF_TINY, c)
        d = 1.0 / d
        h = np.where(done, h, h * d * c)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_TINY, _CF_TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < _CF_EPS
        if done.all():
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge for a={a}, b={b}")


def betainc_pair(a: float, b: float, x, y=None):
    """Return ``(I(a, b; x), 1 - I(a, b; x))`` elementwise.

    ``y`` is ``1 - x``; pass it explicitly when ``x`` is close to 1 so the
    complement is not lost to cancellation.  Arrays are accepted.
    """
    x = np.asarray(x, dtype=float)
    y = 1.0 - x if y is None else np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    lower = np.zeros(x.shape)
    upper = np.ones(x.shape)
    interior = (x > 0) & (y > 0)
    lower[y <= 0] = 1.0
    upper[y <= 0] = 0.0
    if interior.any():
        xi = x[interior]
        yi = y[interior]
        lnb = log_beta(a, b)
        direct = xi < (a + 1.0) / (a + b + 2.0)
        lo = np.empty(xi.shape)
        hi = np.empty(xi.shape)
        if direct.any():
            xs, ys = xi[direct], yi[direct]
            front = np.exp(a * np.log(xs) + b * np.log(ys) - lnb)
            val = front * _lentz_betacf(a, b, xs) / a
            lo[direct] = val
            hi[direct] = 1.0 - val
        flip = ~direct
        if flip.any():
            xs, ys = xi[flip], yi[flip]
            front = np.exp(b * np.log(ys) + a * np.log(xs) - lnb)
            val = front * _lentz_betacf(b, a, ys) / b
            hi[flip] = val
            lo[flip] = 1.0 - val
        lower[interior] = lo
        upper[interior] = hi
    return lower, upper


def reg_inc_beta(mu: float, mu_prime: float, t: float) -> float:
    """Regularized incomplete beta function I(mu, mu'; t), the Beta(mu, mu') CDF."""
    _check_positive("mu", mu)
    _check_positive("mu_prime", mu_prime)
    if not (math.isfinite(t) and 0.0 <= t <= 1.0):
        raise DomainError(f"t must lie in [0, 1], got {t!r}")
    lower, _ = betainc_pair(mu, mu_prime, t)
    return float(lower)
