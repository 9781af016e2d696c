"""Exit times of north-east lattice walks from a rectangle.

A walk of ``M`` east and ``N`` north unit steps, uniform over the
``C(M+N, M)`` arrangements, starts at the origin.  ``R`` is the rectangle
with corners ``(0, 0)`` and ``(M-m, N-n)``, and ``T = min{k : A_k not in R}``.
Because ``E[T] / (M+N+1) = B(1, 1, m, M-m+1, n, N-n+1)`` the mean exit time
is an exact rational.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import IntParamSet, b_exact_rational, multinomial, t_closed_mm1nn1
from .errors import DomainError

_SIM_BATCH = 1 << 15


@dataclass(frozen=True)
class WalkConfig:
    M: int
    N: int
    m: int
    n: int

    def __post_init__(self):
        for name in ("M", "N", "m", "n"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise DomainError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if not (1 <= self.m <= self.M and 1 <= self.n <= self.N):
            raise DomainError(f"need 1 <= m <= M and 1 <= n <= N, got {self}")

    @property
    def corner(self) -> tuple[int, int]:
        """Upper-right corner of the rectangle."""
        return self.M - self.m, self.N - self.n

    @classmethod
    def square(cls, n: int) -> "WalkConfig":
        """Exit from ``[0, n]^2`` for a walk conditioned to reach ``(2n, 2n)``."""
        return cls(2 * n, 2 * n, n, n)


@dataclass(frozen=True)
class ExitTimeReport:
    analytic_mean: Fraction
    simulated_mean: float
    simulated_stderr: float
    samples: int
    seed: int

    @property
    def z_score(self) -> float:
        """Distance of the simulated mean from the analytic one in standard errors."""
        diff = self.simulated_mean - float(self.analytic_mean)
        if self.simulated_stderr == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / self.simulated_stderr


def expected_exit_conditioned(cfg: WalkConfig) -> Fraction:
    """``E[T]`` exactly: ``(M+N+1) * B(1, 1, m, M-m+1, n, N-n+1)``."""
    p = IntParamSet(1, 1, cfg.m, cfg.M - cfg.m + 1, cfg.n, cfg.N - cfg.n + 1)
    return (cfg.M + cfg.N + 1) * b_exact_rational(p)


def expected_exit_square(n: int) -> Fraction:
    """``E[T]`` for :meth:`WalkConfig.square`, from the closed-form string count.

    Same value as ``expected_exit_conditioned(WalkConfig.square(n))`` but
    cheap for large ``n``.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    count = t_closed_mm1nn1(n, n)
    return Fraction((4 * n + 1) * count, multinomial(1, 2 * n, 2 * n))


def expected_exit_unconditioned(n: int) -> float:
    """Mean exit time from ``[0, n]^2`` of the free walk: ``2(n+1) - 2 Gamma(n+3/2) / (sqrt(pi) Gamma(n+1))``."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    ratio = math.exp(math.lgamma(n + 1.5) - math.lgamma(n + 1.0)) / math.sqrt(math.pi)
    return 2.0 * (n + 1) - 2.0 * ratio


def exit_asymptotic_gap(n: int) -> float:
    """``E[T] - (2n - sqrt(2n / pi))`` for the square case; bounded in n."""
    mean = expected_exit_square(n)
    return float(mean - 2 * n) + math.sqrt(2 * n / math.pi)


def _exit_times(steps: np.ndarray, corner: tuple[int, int]) -> np.ndarray:
    """First index k with A_k outside the rectangle, for rows of 0 (east) / 1 (north) steps."""
    north = np.cumsum(steps, axis=1)
    east = np.arange(1, steps.shape[1] + 1)[None, :] - north
    outside = (east > corner[0]) | (north > corner[1])
    # the path ends at (M, N), which is outside, so every row has a hit
    return np.argmax(outside, axis=1) + 1


def expected_exit_enumerated(cfg: WalkConfig) -> Fraction:
    """``E[T]`` by walking every one of the ``C(M+N, M)`` paths; the oracle for small walks."""
    size = cfg.M + cfg.N
    paths = np.zeros((math.comb(size, cfg.N), size), dtype=np.int64)
    for row, north in enumerate(itertools.combinations(range(size), cfg.N)):
        paths[row, list(north)] = 1
    t = _exit_times(paths, cfg.corner)
    return Fraction(int(t.sum()), paths.shape[0])


def sample_paths(cfg: WalkConfig, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` uniform arrangements of M east (0) and N north (1) steps, one per row.

    ``Generator.permuted`` is a Fisher-Yates shuffle drawing its swap indices
    with numpy's unbiased bounded-integer sampler.
    """
    base = np.array([0] * cfg.M + [1] * cfg.N, dtype=np.int64)
    return rng.permuted(np.broadcast_to(base, (count, base.size)), axis=1)


def simulate_conditioned(cfg: WalkConfig, samples: int, seed: int, workers: int = 1) -> ExitTimeReport:
    """Monte Carlo mean of ``T`` over uniformly shuffled step sequences.

    Worker ``i`` of ``workers`` uses substream ``i`` of ``SeedSequence(seed)``
    and handles ``samples // workers`` paths (one more for the first
    ``samples % workers``); the report depends only on
    ``(cfg, samples, seed, workers)``.
    """
    if isinstance(samples, bool) or int(samples) != samples or samples < 1:
        raise DomainError(f"samples must be a positive integer, got {samples!r}")
    samples = int(samples)
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    total = 0
    total_sq = 0
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(workers)):
        rng = np.random.Generator(np.random.PCG64(ss))
        todo = samples // workers + (1 if i < samples % workers else 0)
        while todo > 0:
            k = min(todo, _SIM_BATCH)
            t = _exit_times(sample_paths(cfg, k, rng), cfg.corner)
            if t.min() < 1 or t.max() > cfg.M + cfg.N:
                raise RuntimeError(f"exit time outside [1, {cfg.M + cfg.N}]")
            total += int(t.sum())
            total_sq += int((t * t).sum())
            todo -= k
    mean = total / samples
    if samples > 1:
        var = max((total_sq - samples * mean * mean) / (samples - 1), 0.0)
    else:
        var = 0.0
    return ExitTimeReport(expected_exit_conditioned(cfg), mean, math.sqrt(var / samples), samples, seed)
