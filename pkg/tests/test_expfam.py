import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import binom

from asymgeo.bregman import kl_divergence
from asymgeo.errors import DomainError, MarginalMismatch, SpaceMismatch
from asymgeo.expfam import (
    CONVERGENT,
    DIVERGENT,
    UNDETERMINED,
    TruncatedLottery,
    classify_increments,
    cost_histogram,
    euclidean_reflection_probe,
    hamming_cost,
    legendre_bound,
    mutual_information,
    solve_channel,
    solve_max_expectation,
    solve_min_expectation,
    squared_euclidean_cost,
    st_petersburg_report,
    tilt,
    tilt_channel,
)
from asymgeo.measures import Measure, ProbabilityMeasure, RandomVariable, SampleSpace, product_measure

# max p with p ln 2p + (1-p) ln 2(1-p) = 0.1, by brentq
COIN_MAX = 0.7197946261614098
COIN_BETA = 0.9434431175778442  # ln(p / (1 - p))
# max <(0,1,2), p> over KL[p, (1/2,1/4,1/4)] <= 0.05, by SLSQP on the simplex
THREE_POINT_MAX = 1.0171956495349097

COIN = ProbabilityMeasure([0.5, 0.5])
HEADS = RandomVariable([1.0, 0.0])

probabilities = st.lists(st.floats(0.02, 1.0), min_size=2, max_size=6).map(
    lambda w: ProbabilityMeasure(np.array(w) / math.fsum(w))
)


def test_tilt_member_and_divergence():
    fam = tilt(HEADS, COIN, math.log(2))
    np.testing.assert_allclose(fam.member.weights, [2 / 3, 1 / 3], atol=1e-15)
    assert fam.divergence() == pytest.approx(kl_divergence([2 / 3, 1 / 3], [0.5, 0.5]), abs=1e-15)


def test_tilt_rejects_mismatch_and_non_probability():
    with pytest.raises(SpaceMismatch):
        tilt(RandomVariable([1.0, 2.0, 3.0]), COIN, 1.0)
    with pytest.raises(DomainError):
        tilt(HEADS, Measure([1.0, 1.0]), 1.0)


def test_coin_maximum_matches_root_oracle():
    sol = solve_max_expectation(HEADS, COIN, 0.1)
    assert sol.value == pytest.approx(COIN_MAX, abs=1e-12)
    assert sol.beta == pytest.approx(COIN_BETA, abs=1e-9)
    assert abs(sol.residual) <= 1e-8
    low = solve_min_expectation(HEADS, COIN, 0.1)
    assert low.value == pytest.approx(1 - COIN_MAX, abs=1e-12)


def test_three_point_maximum_matches_slsqp():
    q = ProbabilityMeasure([0.5, 0.25, 0.25])
    x = RandomVariable([0.0, 1.0, 2.0])
    sol = solve_max_expectation(x, q, 0.05)
    assert sol.value == pytest.approx(THREE_POINT_MAX, abs=1e-9)
    assert legendre_bound(x, q, 0.05, sol.beta) == pytest.approx(sol.value, abs=1e-9)


def test_zero_budget_and_constant_direction_return_reference():
    q = ProbabilityMeasure([0.2, 0.3, 0.5])
    x = RandomVariable([1.0, -1.0, 4.0])
    sol = solve_max_expectation(x, q, 0.0)
    assert sol.p.allclose(q) and sol.beta == 0.0
    sol = solve_max_expectation(RandomVariable([2.0, 2.0, 2.0]), q, 0.3)
    assert sol.p.allclose(q) and sol.value == pytest.approx(2.0)


def test_budget_beyond_reach_concentrates_on_argmax():
    q = ProbabilityMeasure([0.2, 0.3, 0.5])
    x = RandomVariable([1.0, 3.0, 2.0])
    sol = solve_max_expectation(x, q, -math.log(0.3) + 0.1)
    assert sol.slack and math.isinf(sol.beta)
    np.testing.assert_array_equal(sol.p.weights, [0.0, 1.0, 0.0])
    assert sol.value == 3.0


def test_negative_budget_rejected():
    with pytest.raises(ValueError):
        solve_max_expectation(HEADS, COIN, -0.1)


@settings(max_examples=40, deadline=None)
@given(q=probabilities, seed=st.integers(0, 2 ** 16), lam=st.floats(0.001, 0.5))
def test_solution_sits_on_the_ball_and_below_legendre(q, seed, lam):
    x = RandomVariable(np.random.default_rng(seed).normal(size=len(q)), q.space)
    sol = solve_max_expectation(x, q, lam)
    if sol.slack:
        return
    assert abs(sol.residual) <= 1e-8
    assert sol.value >= float(x.values @ q.weights) - 1e-12
    for beta in (0.1, 0.5, 1.0, 2.0, sol.beta):
        assert sol.value <= legendre_bound(x, q, lam, beta) + 1e-9
    assert legendre_bound(x, q, lam, sol.beta) == pytest.approx(sol.value, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(q=probabilities, seed=st.integers(0, 2 ** 16), lam=st.floats(0.001, 0.5))
def test_min_is_max_of_negation(q, seed, lam):
    x = RandomVariable(np.random.default_rng(seed).normal(size=len(q)), q.space)
    low = solve_min_expectation(x, q, lam)
    high = solve_max_expectation(-x, q, lam)
    assert low.value == pytest.approx(-high.value, abs=1e-12)
    assert low.value <= float(x.values @ q.weights) + 1e-12


def test_legendre_bound_requires_positive_beta():
    with pytest.raises(ValueError):
        legendre_bound(HEADS, COIN, 0.1, 0.0)


# -- lottery ----------------------------------------------------------------------


@pytest.mark.parametrize("N", [1, 5, 20, 40])
def test_fair_lottery_expectation_is_truncation(N):
    assert TruncatedLottery(N).expectation() == float(N)


def test_biased_lottery_approaches_limit():
    lot = TruncatedLottery(40, h=0.75)
    assert lot.limit_expectation() == 3.0
    assert abs(lot.expectation() - 3.0) <= 1e-9
    assert math.isinf(TruncatedLottery(10).limit_expectation())


def test_lottery_defect_and_conditioning():
    lot = TruncatedLottery(10)
    assert lot.defect_mass() == 2.0 ** -10
    assert math.fsum(lot.weights()) == pytest.approx(1 - 2.0 ** -10, abs=1e-15)
    assert math.fsum(lot.weights(conditioned=True)) == pytest.approx(1.0, abs=1e-15)
    assert lot.expectation(conditioned=True) == pytest.approx(10 / (1 - 2.0 ** -10), rel=1e-14)


def test_lottery_validation():
    with pytest.raises(DomainError):
        TruncatedLottery(61)
    for bad in ({"N": 0}, {"N": 5, "h": 1.0}, {"N": 5, "base": 1.0}):
        with pytest.raises(ValueError):
            TruncatedLottery(**bad)


def test_classify_increments():
    assert classify_increments([0.0, 5.0, 11.0]) == DIVERGENT
    assert classify_increments([1.0, 1.0, 1.0 + 1e-12]) == CONVERGENT
    assert classify_increments([1.0, 1.5, 3.0]) == UNDETERMINED


def test_st_petersburg_report_verdicts():
    report = st_petersburg_report(TruncatedLottery(40))
    assert report["expectation_raw"] == 40.0
    for variant in ("raw", "conditioned"):
        verdicts = report["verdicts"][variant]
        for beta in ("-1.0", "-0.1", "-0.01", "0.0"):
            assert verdicts[beta] == CONVERGENT
        for beta in ("0.01", "0.1"):
            assert verdicts[beta] == DIVERGENT
    assert len(report["psi_table"]) == 2 * 6 * 3


# -- channels ------------------------------------------------------------------------


@pytest.mark.parametrize("length", [1, 3, 5])
@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_hamming_tilt_gives_binomial_errors(length, beta):
    cost, space = hamming_cost(length)
    u = ProbabilityMeasure.uniform(space)
    w = tilt_channel(cost, u, u, beta)
    hist = cost_histogram(cost, w)
    theta = math.exp(-beta) / (1 + math.exp(-beta))
    for k in range(length + 1):
        assert hist[float(k)] == pytest.approx(binom.pmf(k, length, theta), abs=1e-10)


def test_hamming_channel_keeps_uniform_marginals():
    cost, space = hamming_cost(3)
    u = ProbabilityMeasure.uniform(space)
    sol = solve_channel(cost, u, u, 0.5)
    assert abs(sol.residual) <= 1e-8
    assert mutual_information(sol.w, u, u) == pytest.approx(0.5, abs=1e-8)
    assert sol.expected_cost < 1.5  # below the independent-channel error count
    assert sum(sol.histogram.values()) == pytest.approx(1.0, abs=1e-12)


def test_hamming_cost_values():
    cost, space = hamming_cost(2, alphabet_size=3)
    assert len(space) == 9 and len(cost) == 81
    assert cost.values[space.index("01") * 9 + space.index("21")] == 1.0
    assert cost.values[space.index("01") * 9 + space.index("10")] == 2.0
    with pytest.raises(DomainError):
        hamming_cost(11)
    with pytest.raises(ValueError):
        hamming_cost(0)


def test_mutual_information_checks_marginals():
    space = SampleSpace(["a", "b"])
    q = ProbabilityMeasure([0.5, 0.5], space)
    p = ProbabilityMeasure([0.9, 0.1], space)
    w = product_measure(q, q)
    with pytest.raises(MarginalMismatch):
        mutual_information(w, q, p)
    assert mutual_information(w, q, q) == 0.0
    diag = Measure([0.5, 0.0, 0.0, 0.5], space.product(space))
    assert mutual_information(diag, q, q) == pytest.approx(math.log(2), abs=1e-15)


def test_squared_euclidean_cost_and_probe():
    cost, space = squared_euclidean_cost([0.0, 1.0, 3.0])
    assert cost.values.reshape(3, 3)[0, 2] == 9.0
    rows = euclidean_reflection_probe(0.5, [1.0, 2.0, 4.0])
    assert all(r["psi_minimize"] <= 0 for r in rows)
    growth = [r["psi_maximize"] for r in rows]
    assert growth[0] < growth[1] < growth[2]
