import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from betaint.errors import DomainError
from betaint.walks import (
    WalkConfig,
    _exit_times,
    exit_asymptotic_gap,
    expected_exit_conditioned,
    expected_exit_enumerated,
    expected_exit_square,
    expected_exit_unconditioned,
    sample_paths,
    simulate_conditioned,
)


def configs(max_size):
    for M in range(1, max_size):
        for N in range(1, max_size - M + 1):
            for m in range(1, M + 1):
                for n in range(1, N + 1):
                    yield WalkConfig(M, N, m, n)


def test_config_validation():
    with pytest.raises(DomainError):
        WalkConfig(2, 2, 0, 1)
    with pytest.raises(DomainError):
        WalkConfig(2, 2, 3, 1)
    with pytest.raises(DomainError):
        WalkConfig(2, 2.0, 1, 1)
    assert WalkConfig(5, 7, 2, 3).corner == (3, 4)
    assert WalkConfig.square(3) == WalkConfig(6, 6, 3, 3)


def test_conditioned_examples():
    assert expected_exit_conditioned(WalkConfig(2, 2, 1, 1)) == Fraction(8, 3)
    assert expected_exit_conditioned(WalkConfig(2, 2, 2, 2)) == 1
    assert expected_exit_conditioned(WalkConfig(1, 1, 1, 1)) == 1


def test_exit_times_of_all_paths_for_the_2_by_2_walk():
    paths = np.array([[0, 0, 1, 1], [0, 1, 0, 1], [0, 1, 1, 0], [1, 0, 0, 1], [1, 0, 1, 0], [1, 1, 0, 0]])
    assert sorted(_exit_times(paths, (1, 1)).tolist()) == [2, 2, 3, 3, 3, 3]


def test_conditioned_matches_enumeration():
    for cfg in configs(12):
        assert expected_exit_conditioned(cfg) == expected_exit_enumerated(cfg), cfg


@pytest.mark.parametrize("n", range(1, 8))
def test_square_closed_form(n):
    assert expected_exit_square(n) == expected_exit_conditioned(WalkConfig.square(n))


def test_unconditioned_examples():
    assert expected_exit_unconditioned(1) == pytest.approx(2.5, rel=1e-15)
    assert expected_exit_unconditioned(2) == pytest.approx(4.125, rel=1e-15)


@given(st.integers(1, 150))
def test_unconditioned_matches_direct_sum(n):
    # the free walk leaves [0, n]^2 at step k with probability 2 C(k-1, n) / 2^k
    direct = sum(Fraction(2 * k * math.comb(k - 1, n), 2**k) for k in range(n + 1, 2 * n + 2))
    assert expected_exit_unconditioned(n) == pytest.approx(float(direct), rel=1e-13)


def test_unconditioned_asymptotics_bounded():
    gaps = [expected_exit_unconditioned(n) - (2 * n - 2 * math.sqrt(n / math.pi)) for n in (10, 100, 1000, 10000)]
    assert all(0 < g < 3 for g in gaps)


def test_gap_examples():
    assert exit_asymptotic_gap(1) == pytest.approx(8 / 3 - 2 + math.sqrt(2 / math.pi), rel=1e-15)
    assert exit_asymptotic_gap(1) == pytest.approx(1.4645, abs=1e-4)
    gaps = [exit_asymptotic_gap(n) for n in (10, 50, 100, 500)]
    assert all(1.5 < g < 1.53 for g in gaps)


def test_simulation_examples():
    r = simulate_conditioned(WalkConfig(2, 2, 1, 1), 1_000_000, seed=7)
    assert r.analytic_mean == Fraction(8, 3)
    assert abs(r.z_score) < 4
    r = simulate_conditioned(WalkConfig(1, 1, 1, 1), 1000, seed=1)
    assert r.simulated_mean == 1.0 and r.simulated_stderr == 0.0 and r.z_score == 0.0


def test_simulation_is_deterministic():
    cfg = WalkConfig(5, 4, 2, 3)
    assert simulate_conditioned(cfg, 50_000, seed=11) == simulate_conditioned(cfg, 50_000, seed=11)
    assert simulate_conditioned(cfg, 50_000, seed=11, workers=3) == simulate_conditioned(cfg, 50_000, seed=11, workers=3)
    assert simulate_conditioned(cfg, 50_000, seed=11) != simulate_conditioned(cfg, 50_000, seed=12)


def test_simulation_rejects_bad_sample_count():
    with pytest.raises(DomainError):
        simulate_conditioned(WalkConfig(2, 2, 1, 1), 0, seed=1)


@pytest.mark.parametrize("cfg", [WalkConfig(6, 5, 3, 2), WalkConfig(8, 8, 4, 4), WalkConfig(3, 9, 1, 5)])
def test_simulated_exit_times_in_range(cfg):
    rng = np.random.Generator(np.random.PCG64(5))
    t = _exit_times(sample_paths(cfg, 20_000, rng), cfg.corner)
    assert t.min() >= 1 and t.max() <= cfg.M + cfg.N


@pytest.mark.parametrize("M, N", [(1, 1), (2, 1), (3, 3), (2, 4), (5, 1)])
def test_sampler_is_uniform_over_arrangements(M, N):
    cfg = WalkConfig(M, N, 1, 1)
    rng = np.random.Generator(np.random.PCG64(2024))
    paths = sample_paths(cfg, 1_000_000, rng)
    assert (paths.sum(axis=1) == N).all()
    codes = paths @ (1 << np.arange(M + N))
    index = {sum(1 << i for i in north): j for j, north in enumerate(itertools.combinations(range(M + N), N))}
    observed = np.zeros(len(index))
    uniq, freq = np.unique(codes, return_counts=True)
    for c, f in zip(uniq, freq):
        observed[index[int(c)]] = f
    # every arrangement is hit, and no code outside the arrangements appears
    assert (observed > 0).all() and observed.sum() == paths.shape[0]
    if len(index) > 1:
        assert stats.chisquare(observed).pvalue > 1e-6
