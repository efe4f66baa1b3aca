"""Exact counting layer: pmf vs enumeration, closed-form moments, maxima."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from runslab.combinatorics import (
    brute_force_max_pmf,
    brute_force_pattern_moments,
    count_runs,
    max_pmf_subset_dp,
    mean_runs_discrete,
    mean_runs_time,
    run_count_pmf,
    run_count_pmf_enumerated,
    run_count_prob_float,
    var_runs_discrete,
    var_runs_time,
)
from runslab.patterns import run_length_pattern, runs_pattern


# -- run counting ------------------------------------------------------------


def test_count_runs_basics():
    assert count_runs([]) == 0
    assert count_runs([0, 0, 0]) == 0
    assert count_runs([1, 1, 1]) == 1
    assert count_runs([1, 0, 1, 1, 0, 1]) == 3


def test_count_runs_cyclic_wraps():
    assert count_runs([1, 0, 1], cyclic=True) == 1  # wraps into one arc
    assert count_runs([1, 0, 1]) == 2
    assert count_runs([1, 1, 1], cyclic=True) == 0  # full circle, no ascent


@given(st.lists(st.integers(0, 1), min_size=1, max_size=12))
def test_cyclic_and_linear_counts_within_one(cells):
    assert abs(count_runs(cells) - count_runs(cells, cyclic=True)) <= 1


@given(st.lists(st.integers(0, 1), min_size=1, max_size=12))
def test_count_runs_complement_of_reversal(cells):
    # runs of 1s in the reversal = runs of 1s, and 0-runs relate by +-1
    assert count_runs(cells[::-1]) == count_runs(cells)


# -- the fixed-m distribution ------------------------------------------------


def test_pmf_small_case_by_hand():
    # n=4, m=2: six configurations; 1100/0110/0011 one run, 1010/1001/0101 two
    pmf = run_count_pmf(4, 2)
    assert pmf.probs[1] == Fraction(1, 2)
    assert pmf.probs[2] == Fraction(1, 2)


@pytest.mark.parametrize("n", range(1, 9))
def test_pmf_matches_enumeration(n):
    for m in range(n + 1):
        assert run_count_pmf(n, m).probs == run_count_pmf_enumerated(n, m).probs


def test_pmf_sums_to_one():
    for n in range(1, 10):
        for m in range(n + 1):
            assert sum(run_count_pmf(n, m).probs.values()) == 1


def test_closed_form_moments_match_pmf():
    for n in range(1, 9):
        for m in range(n + 1):
            pmf = run_count_pmf(n, m)
            assert pmf.mean() == mean_runs_discrete(n, m)
            assert pmf.variance() == var_runs_discrete(n, m)


def test_discrete_moment_examples():
    assert mean_runs_discrete(4, 2) == Fraction(3, 2)
    assert var_runs_discrete(4, 2) == Fraction(1, 4)
    assert mean_runs_discrete(5, 0) == 0
    assert mean_runs_discrete(5, 5) == 1
    assert var_runs_discrete(5, 5) == 0


def test_prob_float_agrees_with_exact():
    for n in (6, 11):
        for m in range(n + 1):
            pmf = run_count_pmf(n, m)
            for k, p in pmf.probs.items():
                assert run_count_prob_float(n, m, k) == pytest.approx(float(p), rel=1e-12)


def test_invalid_ranges_rejected():
    with pytest.raises(ValueError):
        run_count_pmf(0, 0)
    with pytest.raises(ValueError):
        run_count_pmf(4, 5)
    with pytest.raises(ValueError):
        mean_runs_discrete(3, -1)


# -- randomized fill times ---------------------------------------------------


@pytest.mark.parametrize("t", [Fraction(1, 5), Fraction(1, 2), Fraction(3, 4)])
def test_time_moments_are_binomial_mixtures(t):
    for n in range(1, 9):
        mix_mean = Fraction(0)
        mix_second = Fraction(0)
        for m in range(n + 1):
            w = math.comb(n, m) * t**m * (1 - t) ** (n - m)
            mu = mean_runs_discrete(n, m)
            mix_mean += w * mu
            mix_second += w * (var_runs_discrete(n, m) + mu * mu)
        assert mix_mean == mean_runs_time(n, t)
        assert mix_second - mix_mean**2 == var_runs_time(n, t)


def test_time_variance_single_cell_is_bernoulli():
    # the adjacent-pair closed form does not apply at n=1
    t = Fraction(3, 4)
    assert var_runs_time(1, t) == t * (1 - t)
    assert var_runs_time(1, Fraction(1, 2)) == Fraction(1, 4)


def test_time_variance_at_half():
    # n/16 + 1/16 at t = 1/2
    for n in range(2, 12):
        assert var_runs_time(n, Fraction(1, 2)) == Fraction(n, 16) + Fraction(1, 16)


# -- maximum over the insertion history --------------------------------------


def test_max_pmf_three_cells():
    assert brute_force_max_pmf(3) == {1: Fraction(2, 3), 2: Fraction(1, 3)}


def test_max_mean_three_cells():
    pmf = brute_force_max_pmf(3)
    assert sum(k * p for k, p in pmf.items()) == Fraction(4, 3)


@pytest.mark.parametrize("n", range(1, 9))
def test_subset_dp_matches_brute_force(n):
    assert max_pmf_subset_dp(n) == brute_force_max_pmf(n)


def test_max_pmf_is_a_distribution():
    for n in (5, 10, 13):
        pmf = max_pmf_subset_dp(n)
        assert sum(pmf.values()) == 1
        assert all(1 <= k <= (n + 1) // 2 for k in pmf)


def test_max_mean_thirteen_frozen():
    # enumeration result pinned; the published simulation value is 4.22
    pmf = max_pmf_subset_dp(13)
    assert sum(k * p for k, p in pmf.items()) == Fraction(82491109, 19459440)


def test_max_dominates_final_count():
    # max over history >= number of runs at full occupancy (which is 1)
    for n in range(1, 8):
        assert min(max_pmf_subset_dp(n)) >= 1


def test_subset_dp_budget_enforced():
    with pytest.raises(ValueError):
        max_pmf_subset_dp(40)


# -- exhaustive pattern moments ----------------------------------------------


def test_pattern_moments_match_runs_closed_form():
    # the ascent window reproduces the cyclic run count; for 0 < m < n the
    # cyclic and linear counts have the same mean shift of zero only in the
    # cyclic convention, so compare within the cyclic world
    pat = runs_pattern()
    for n in (4, 6):
        for m in range(n + 1):
            got = brute_force_pattern_moments(pat, n, m, cyclic=True)
            ref = run_count_pmf_enumerated(n, m, cyclic=True)
            assert got.mean == ref.mean()
            assert got.variance == ref.variance()


def test_pattern_moments_uniform_window_is_constant():
    # a window that always scores 1 sums to n in cyclic mode, variance 0
    from runslab.patterns import constant_pattern

    pat = constant_pattern(1, length=2)
    res = brute_force_pattern_moments(pat, 5, 3, cyclic=True)
    assert res.mean == 5
    assert res.variance == 0


def test_pattern_moments_run_length_one_small():
    # isolated 1s among n=4, m=2, cyclic: 1010 and 0101 score 2, the four
    # adjacent pairs score 0, so the mean is 4/6 and E[X^2] = 8/6
    pat = run_length_pattern(1)
    res = brute_force_pattern_moments(pat, 4, 2, cyclic=True)
    assert res.mean == Fraction(2, 3)
    assert res.variance == Fraction(8, 9)


@settings(deadline=None, max_examples=25)
@given(st.integers(3, 7), st.data())
def test_pattern_moments_nonnegative_variance(n, data):
    m = data.draw(st.integers(0, n))
    res = brute_force_pattern_moments(run_length_pattern(1), n, m, cyclic=True)
    assert res.variance >= 0
