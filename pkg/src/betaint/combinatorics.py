"""Exact counts for integer parameters.

With positive integer parameters the beta variables are order statistics of
uniforms, so ``B(l, l', m, m', n, n') = T / multinomial(L+M+N; L, M, N)``
where ``T`` counts the strings of ``L`` X's, ``M`` Y's and ``N`` Z's in which
the l-th X has at least m Y's and at least n Z's before it
(``L = l + l' - 1`` and so on).  Rationals are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .errors import BudgetExceeded, DomainError, IntegralityError
from .hyper_series import pfq_exact

#: largest L + M + N that the brute-force enumerator accepts by default
BRUTE_FORCE_BUDGET = 18

TABLE_KINDS = ("t11mmnn", "t11mm1nn1", "t11mnmn")
SEQUENCES = ("pentagonal", "iid_diag", "mm1_diag", "one_n", "central_binomial")


def _pos_int(name: str, v) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
        raise DomainError(f"{name} must be a positive integer, got {v!r}")
    return int(v)


@dataclass(frozen=True)
class IntParamSet:
    ell: int
    ell_prime: int
    m: int
    m_prime: int
    n: int
    n_prime: int

    def __post_init__(self):
        for name in ("ell", "ell_prime", "m", "m_prime", "n", "n_prime"):
            object.__setattr__(self, name, _pos_int(name, getattr(self, name)))

    @property
    def L(self) -> int:
        return self.ell + self.ell_prime - 1

    @property
    def M(self) -> int:
        return self.m + self.m_prime - 1

    @property
    def N(self) -> int:
        return self.n + self.n_prime - 1

    def as_tuple(self) -> tuple[int, ...]:
        return (self.ell, self.ell_prime, self.m, self.m_prime, self.n, self.n_prime)

    def swapped(self) -> "IntParamSet":
        return IntParamSet(self.ell, self.ell_prime, self.n, self.n_prime, self.m, self.m_prime)

    def cyclic(self) -> "IntParamSet":
        return IntParamSet(self.m, self.m_prime, self.n, self.n_prime, self.ell, self.ell_prime)


def multinomial(*counts: int) -> int:
    out = factorial(sum(counts))
    for c in counts:
        out //= factorial(c)
    return out


def _beta_int(a: int, b: int) -> Fraction:
    return Fraction(factorial(a - 1) * factorial(b - 1), factorial(a + b - 1))


def _rising(a: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= a + i
    return out


def _f21_coef(mu: int, mu_p: int, j: int) -> Fraction:
    """Taylor coefficient ``mu (1-mu')_j / ((mu+j) j!)`` of 2F1(1-mu', mu; mu+1; t)."""
    return Fraction(mu * _rising(1 - mu_p, j), (mu + j) * factorial(j))


def b_exact_rational(p: IntParamSet) -> Fraction:
    """B for integer parameters as an exact rational.

    Uses the n-indexed series of 4F3 values with the pair of smaller primed
    parameter in the ``(m, m')`` slot.  For ``n >= m'`` the prefactor
    ``(1-m')_n`` is zero while the 4F3 meets a pole first; those terms take
    their limiting value, the Cauchy product of the two 2F1 Taylor series.
    The series ends after ``m' + n' - 1`` terms.
    """
    if p.n_prime < p.m_prime:
        p = p.swapped()
    lam, lam_p, mu, mu_p, nu, nu_p = p.as_tuple()
    a = lam + mu + nu
    total = Fraction(0)
    for n in range(mu_p + nu_p - 1):
        if n < mu_p:
            coef = Fraction(_rising(1 - mu_p, n), (mu + n) * factorial(n))
            inner = pfq_exact([1 - nu_p, nu, -mu - n, -n], [1 + nu, mu_p - n, 1 - mu - n])
            term = coef * inner
        else:
            term = sum(_f21_coef(mu, mu_p, i) * _f21_coef(nu, nu_p, n - i) for i in range(mu_p)) / mu
        total += term * _beta_int(a + n, lam_p)
    return total / (nu * _beta_int(lam, lam_p) * _beta_int(mu, mu_p) * _beta_int(nu, nu_p))


def t_count(p: IntParamSet) -> int:
    """Number of qualifying strings, ``multinomial(L+M+N; L, M, N) * B``."""
    value = multinomial(p.L, p.M, p.N) * b_exact_rational(p)
    if value.denominator != 1:
        raise IntegralityError(f"count for {p.as_tuple()} is not an integer: {value}")
    return value.numerator


def _next_permutation(seq: list) -> bool:
    """Advance ``seq`` to its next lexicographic arrangement in place; False at the last one."""
    i = len(seq) - 2
    while i >= 0 and seq[i] >= seq[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = len(seq) - 1
    while seq[j] <= seq[i]:
        j -= 1
    seq[i], seq[j] = seq[j], seq[i]
    seq[i + 1:] = reversed(seq[i + 1:])
    return True


@lru_cache(maxsize=None)
def _prefix_histogram(L: int, M: int, N: int) -> np.ndarray:
    """``h[l, y, z]``: strings whose (l+1)-th X has exactly y Y's and z Z's before it."""
    hist = np.zeros((L, M + 1, N + 1), dtype=np.int64)
    # 0 = X, 1 = Y, 2 = Z; the sorted start is the first arrangement
    seq = [0] * L + [1] * M + [2] * N
    while True:
        y = z = x = 0
        for c in seq:
            if c == 0:
                hist[x, y, z] += 1
                x += 1
            elif c == 1:
                y += 1
            else:
                z += 1
        if not _next_permutation(seq):
            break
    return hist


def t_count_bruteforce(p: IntParamSet, budget: int = BRUTE_FORCE_BUDGET) -> int:
    """Count the strings directly by walking every arrangement of the letters.

    All strings for one ``(L, M, N)`` are enumerated once and summarized in a
    histogram, so different ``(l, m, n)`` with the same sizes share the work.
    """
    if p.L + p.M + p.N > budget:
        raise BudgetExceeded(f"L+M+N = {p.L + p.M + p.N} exceeds the enumeration budget {budget}")
    hist = _prefix_histogram(p.L, p.M, p.N)
    return int(hist[p.ell - 1, p.m:, p.n:].sum())


# ---------------------------------------------------------------------------
# Closed forms for the three tabulated families


def _as_int(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise IntegralityError(f"{what} is not an integer: {value}")
    return value.numerator


def t_closed_mmnn(m: int, n: int) -> int:
    """T(1,1,m,m,n,n) = 1/(2B(2m,2n)) - C(m+n,m)/(2B(m,n))."""
    m, n = _pos_int("m", m), _pos_int("n", n)
    value = 1 / (2 * _beta_int(2 * m, 2 * n)) - comb(m + n, m) / (2 * _beta_int(m, n))
    return _as_int(value, f"T(1,1,{m},{m},{n},{n})")


def t_closed_mm1nn1(m: int, n: int) -> int:
    """T(1,1,m,m+1,n,n+1) = (4mn+3(m+n)+2)/(4(m+n+1)) C(2(m+n+1),2m+1) - (m+n)/2 C(m+n,m)^2."""
    m, n = _pos_int("m", m), _pos_int("n", n)
    value = Fraction(4 * m * n + 3 * (m + n) + 2, 4 * (m + n + 1)) * comb(2 * (m + n + 1), 2 * m + 1)
    value -= Fraction(m + n, 2) * comb(m + n, m) ** 2
    return _as_int(value, f"T(1,1,{m},{m + 1},{n},{n + 1})")


def t_closed_mnmn(m: int, n: int) -> int:
    """T(1,1,m,n,m,n) = n C(2m+2n-1, m+n) - 2mn/(m+n) C(2m-1,m) C(2n-1,n)."""
    m, n = _pos_int("m", m), _pos_int("n", n)
    value = n * comb(2 * m + 2 * n - 1, m + n) - Fraction(2 * m * n, m + n) * comb(2 * m - 1, m) * comb(2 * n - 1, n)
    return _as_int(value, f"T(1,1,{m},{n},{m},{n})")


def sequence(name: str, count: int) -> list[int]:
    """First ``count`` terms (index 1, 2, ...) of a named integer sequence."""
    count = _pos_int("count", count)
    ks = range(1, count + 1)
    if name == "pentagonal":
        return [k * (3 * k + 1) // 2 for k in ks]
    if name == "iid_diag":
        return [t_count(IntParamSet(1, 1, k, k, k, k)) for k in ks]
    if name == "mm1_diag":
        return [t_count(IntParamSet(1, 1, k, k + 1, k, k + 1)) for k in ks]
    if name == "one_n":
        return [2 * k * comb(2 * k, k - 1) for k in ks]
    if name == "central_binomial":
        return [comb(2 * k, k) for k in ks]
    raise ValueError(f"unknown sequence {name!r}; expected one of {SEQUENCES}")


def _family(kind: str, m: int, n: int) -> IntParamSet:
    if kind == "t11mmnn":
        return IntParamSet(1, 1, m, m, n, n)
    if kind == "t11mm1nn1":
        return IntParamSet(1, 1, m, m + 1, n, n + 1)
    if kind == "t11mnmn":
        return IntParamSet(1, 1, m, n, m, n)
    raise ValueError(f"unknown table {kind!r}; expected one of {TABLE_KINDS}")


def table(kind: str, max_row: int) -> list[list[int]]:
    """Triangular table of counts: row ``s = m + n`` for ``s = 2..max_row``, entry ``m = 1..s-1``."""
    max_row = _pos_int("max_row", max_row)
    if max_row < 2:
        raise DomainError("max_row must be at least 2")
    return [[t_count(_family(kind, m, s - m)) for m in range(1, s)] for s in range(2, max_row + 1)]


def table_csv(kind: str, max_row: int) -> str:
    """The table as CSV: header ``m+n,1,...``, one row per ``m+n``, empty cells above the diagonal."""
    rows = table(kind, max_row)
    width = max_row - 1
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m+n"] + [str(m) for m in range(1, width + 1)])
    for s, row in zip(range(2, max_row + 1), rows):
        writer.writerow([str(s)] + [str(v) for v in row] + [""] * (width - len(row)))
    return buf.getvalue()
