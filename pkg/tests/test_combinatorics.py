import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from betaint.beta_integrals import ParamSet, b_general
from betaint.combinatorics import (
    BRUTE_FORCE_BUDGET,
    IntParamSet,
    b_exact_rational,
    multinomial,
    sequence,
    t_closed_mm1nn1,
    t_closed_mmnn,
    t_closed_mnmn,
    t_count,
    t_count_bruteforce,
    table,
    table_csv,
)
from betaint.errors import BudgetExceeded, DomainError
from conftest import GOLDEN


def small_params(limit):
    """Every IntParamSet with L + M + N <= limit."""
    for tup in itertools.product(range(1, limit + 1), repeat=6):
        p = IntParamSet(*tup)
        if p.L + p.M + p.N <= limit:
            yield p


def test_int_param_set_validation():
    with pytest.raises(DomainError):
        IntParamSet(1, 1, 0, 1, 1, 1)
    with pytest.raises(DomainError):
        IntParamSet(1, 1, 1.5, 1, 1, 1)
    with pytest.raises(DomainError):
        IntParamSet(True, 1, 1, 1, 1, 1)
    p = IntParamSet(2, 3, 1, 4, 5, 1)
    assert (p.L, p.M, p.N) == (4, 4, 5)


@pytest.mark.parametrize("args, expected", [
    ((1, 1, 1, 1, 1, 1), 2),
    ((1, 1, 2, 2, 2, 2), 52),
    ((1, 1, 2, 3, 2, 3), 306),
])
def test_t_count_examples(args, expected):
    assert t_count(IntParamSet(*args)) == expected


@pytest.mark.parametrize("args, expected", [
    ((1, 1, 1, 1, 1, 1), 2),
    ((1, 1, 1, 2, 1, 2), 16),
    ((1, 1, 2, 1, 2, 1), 6),
])
def test_bruteforce_examples(args, expected):
    assert t_count_bruteforce(IntParamSet(*args)) == expected


def test_bruteforce_budget():
    p = IntParamSet(5, 5, 5, 5, 1, 1)
    assert p.L + p.M + p.N > BRUTE_FORCE_BUDGET
    with pytest.raises(BudgetExceeded):
        t_count_bruteforce(p)
    q = IntParamSet(3, 3, 3, 3, 1, 1)
    with pytest.raises(BudgetExceeded):
        t_count_bruteforce(q, budget=10)
    assert t_count_bruteforce(q, budget=11) == t_count(q)


@pytest.mark.parametrize("args, expected", [
    ((1, 1, 1, 1, 1, 1), Fraction(1, 3)),
    ((1, 1, 1, 2, 1, 2), Fraction(8, 15)),
    ((1, 1, 2, 2, 2, 2), Fraction(13, 35)),
    ((1, 1, 2, 2, 1, 1), Fraction(7, 20)),
])
def test_b_exact_examples(args, expected):
    assert b_exact_rational(IntParamSet(*args)) == expected


def test_count_matches_enumeration_up_to_size_12():
    checked = 0
    for p in small_params(12):
        assert t_count(p) == t_count_bruteforce(p), p
        checked += 1
    assert checked > 1000


@pytest.mark.slow
def test_exact_matches_general_for_entries_up_to_5():
    worst = 0.0
    for tup in itertools.product(range(1, 6), repeat=6):
        exact = float(b_exact_rational(IntParamSet(*tup)))
        worst = max(worst, abs(b_general(ParamSet(*tup)).value - exact))
    assert worst <= 1e-10


@given(st.tuples(*[st.integers(1, 7)] * 6))
def test_exact_cyclicity(tup):
    p = IntParamSet(*tup)
    assert b_exact_rational(p) + b_exact_rational(p.cyclic()) + b_exact_rational(p.cyclic().cyclic()) == 1


@given(st.tuples(*[st.integers(1, 7)] * 6))
def test_exact_swap(tup):
    p = IntParamSet(*tup)
    assert b_exact_rational(p) == b_exact_rational(p.swapped())


@given(st.tuples(*[st.integers(1, 8)] * 6))
def test_exact_value_is_a_probability_with_integer_count(tup):
    p = IntParamSet(*tup)
    q = b_exact_rational(p)
    assert 0 < q < 1
    assert (q * multinomial(p.L, p.M, p.N)).denominator == 1


def test_closed_form_examples():
    assert t_closed_mmnn(1, 2) == 7
    assert t_closed_mmnn(3, 3) == 1086
    assert t_closed_mmnn(1, 1) == 2
    assert t_closed_mm1nn1(1, 1) == 16
    assert t_closed_mm1nn1(2, 3) == 1103
    assert t_closed_mm1nn1(2, 4) == 3043
    assert t_closed_mm1nn1(4, 4) == 101950
    assert t_closed_mnmn(1, 2) == 16
    assert t_closed_mnmn(2, 2) == 52
    # the family is not symmetric in (m, n): three X-letters-first orderings give 20, not 90
    assert t_closed_mnmn(3, 1) == 20 == t_count_bruteforce(IntParamSet(1, 1, 3, 1, 3, 1))
    assert t_closed_mnmn(1, 3) == 90 == t_count_bruteforce(IntParamSet(1, 1, 1, 3, 1, 3))


def test_closed_forms_match_counts_up_to_row_10():
    for s in range(2, 11):
        for m in range(1, s):
            n = s - m
            assert t_closed_mmnn(m, n) == t_count(IntParamSet(1, 1, m, m, n, n))
            assert t_closed_mm1nn1(m, n) == t_count(IntParamSet(1, 1, m, m + 1, n, n + 1))
            assert t_closed_mnmn(m, n) == t_count(IntParamSet(1, 1, m, n, m, n))


def test_sequences():
    assert sequence("pentagonal", 3) == [2, 7, 15]
    assert sequence("iid_diag", 5) == [2, 52, 1086, 20840, 382510]
    assert sequence("mm1_diag", 5) == [16, 306, 5664, 101950, 1798776]
    assert sequence("central_binomial", 4) == [2, 6, 20, 70]
    assert sequence("one_n", 3) == [2, 16, 90]
    with pytest.raises(ValueError):
        sequence("fibonacci", 3)
    with pytest.raises(DomainError):
        sequence("pentagonal", 0)


def test_table_edge_columns_are_named_sequences():
    # first column of the i.i.d. table is the pentagonal sequence; T(1,1,1,n,1,n) and T(1,1,n,1,n,1) are one_n and C(2n,n)
    rows = table("t11mmnn", 8)
    assert [r[0] for r in rows] == sequence("pentagonal", 7)
    rows = table("t11mnmn", 8)
    assert [r[0] for r in rows] == sequence("one_n", 7)
    assert [r[-1] for r in rows] == sequence("central_binomial", 7)


@pytest.mark.parametrize("kind", ["t11mmnn", "t11mm1nn1", "t11mnmn"])
def test_tables_match_golden(kind):
    assert table_csv(kind, 6) == (GOLDEN / f"{kind}.csv").read_text()


@pytest.mark.parametrize("kind", ["t11mmnn", "t11mm1nn1"])
def test_tables_rows_are_symmetric(kind):
    for row in table(kind, 10):
        assert row == row[::-1]


def test_table_needs_two_rows():
    with pytest.raises(DomainError):
        table("t11mmnn", 1)
    with pytest.raises(ValueError):
        table("t11xx", 4)
