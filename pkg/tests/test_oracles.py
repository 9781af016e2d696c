import itertools
import math

import numpy as np
import pytest
from scipy import stats

from betaint.beta_integrals import ParamSet, b_general
from betaint.combinatorics import IntParamSet, b_exact_rational
from betaint.errors import DomainError
from betaint.oracles import b_montecarlo, b_quadrature, sample_beta, sample_beta_array
from references import B_REFERENCE


def rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@pytest.mark.parametrize("args, expected", [((1, 1, 1, 1, 1, 1), 1 / 3), ((1, 1, 2, 2, 2, 2), 13 / 35)])
def test_quadrature_examples(args, expected):
    r = b_quadrature(ParamSet(*args), 1e-12)
    assert r.value == pytest.approx(expected, abs=1e-12)
    assert r.abs_error_estimate >= 0 and r.evaluations >= 1


def test_quadrature_endpoint_singularities():
    p = ParamSet(0.5, 0.5, 1, 1, 1, 1)
    assert b_quadrature(p).value == pytest.approx(b_general(p).value, abs=1e-8)
    assert b_quadrature(p).value == pytest.approx(0.375, abs=1e-12)


@pytest.mark.parametrize("args, expected", sorted(B_REFERENCE.items()))
def test_quadrature_references(args, expected):
    assert b_quadrature(ParamSet(*args), 1e-13).value == pytest.approx(expected, abs=1e-11)


def test_quadrature_matches_exact_for_entries_up_to_4():
    worst = 0.0
    for tup in itertools.product(range(1, 5), repeat=6):
        q = b_quadrature(ParamSet(*tup), 1e-12).value
        worst = max(worst, abs(q - float(b_exact_rational(IntParamSet(*tup)))))
    assert worst <= 1e-9


@pytest.mark.parametrize("args", [(1.3, 0.4, 2.2, 0.7, 5.1, 3.3), (0.2, 7.0, 0.3, 0.3, 9.0, 1.1)])
def test_quadrature_swap_is_exact(args):
    p = ParamSet(*args)
    assert b_quadrature(p).value == b_quadrature(p.swapped()).value


def test_quadrature_rejects_tiny_tolerance():
    with pytest.raises(DomainError):
        b_quadrature(ParamSet(1, 1, 1, 1, 1, 1), 1e-16)


def test_uniform_variates_pass_ks():
    x = sample_beta_array(1, 1, 100_000, rng(1))
    assert stats.kstest(x, "uniform").pvalue > 1e-6


@pytest.mark.parametrize("mu, mu_p", [(0.3, 0.7), (2.5, 1.2), (8.0, 0.5), (0.05, 3.0)])
def test_gamma_ratio_variates_pass_ks(mu, mu_p):
    x = sample_beta_array(mu, mu_p, 100_000, rng(2))
    assert stats.kstest(x, "beta", args=(mu, mu_p)).pvalue > 1e-6


@pytest.mark.parametrize("m, m_p", [(1, 1), (2, 3), (4, 1), (3, 5)])
def test_order_statistic_and_gamma_constructions_agree(m, m_p):
    a = sample_beta_array(m, m_p, 100_000, rng(3), method="order")
    b = sample_beta_array(m, m_p, 100_000, rng(4), method="gamma")
    assert stats.ks_2samp(a, b).pvalue > 1e-6


def test_order_statistic_needs_integers():
    with pytest.raises(DomainError):
        sample_beta_array(1.5, 2, 10, rng(0), method="order")
    with pytest.raises(DomainError):
        sample_beta_array(0, 2, 10, rng(0))


def test_beta_sample_mean():
    x = sample_beta_array(2, 3, 1_000_000, rng(5))
    sd = math.sqrt(2 * 3 / (25 * 6)) / math.sqrt(x.size)
    assert abs(x.mean() - 0.4) < 4 * sd


def test_single_variate_in_unit_interval():
    g = rng(6)
    vals = [sample_beta(0.5, 0.5, g) for _ in range(200)]
    assert all(0 < v < 1 for v in vals)


@pytest.mark.parametrize("args, expected", [((1, 1, 1, 1, 1, 1), 1 / 3), ((1, 1, 1, 2, 1, 2), 8 / 15)])
def test_montecarlo_examples(args, expected):
    r = b_montecarlo(ParamSet(*args), 400_000, seed=9)
    assert abs(r.estimate - expected) < 4 * r.stderr
    assert r.stderr == pytest.approx(math.sqrt(r.estimate * (1 - r.estimate) / r.samples))


def test_montecarlo_is_deterministic():
    p = ParamSet(2.5, 1.5, 0.7, 3.2, 1.3, 0.4)
    assert b_montecarlo(p, 100_000, seed=13) == b_montecarlo(p, 100_000, seed=13)
    assert b_montecarlo(p, 100_000, seed=13, workers=4) == b_montecarlo(p, 100_000, seed=13, workers=4)
    assert b_montecarlo(p, 100_000, seed=13).estimate != b_montecarlo(p, 100_000, seed=14).estimate


def test_montecarlo_cyclic_sum():
    p = ParamSet(2.5, 1.5, 0.7, 3.2, 1.3, 0.4)
    rs = [b_montecarlo(q, 200_000, seed=s) for s, q in enumerate((p, p.cyclic(), p.cyclic().cyclic()))]
    total = sum(r.estimate for r in rs)
    assert abs(total - 1) < 4 * math.sqrt(sum(r.stderr**2 for r in rs))
