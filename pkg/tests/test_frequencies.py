import pytest
import sys, os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

import logging
from fractions import Fraction
from itertools import product
from math import factorial

import mpmath

from quadvol.errors import DomainError
from quadvol.exact_arith import PiMonomial
from quadvol.frequencies import (
    EXCEPTIONAL_FLAG,
    WeightedMulticurve,
    b_gn,
    c_gamma,
    c_tilde,
    frequency_normalization,
    frequency_report,
    mirzakhani_separating_frequency,
    sep_nonsep_deviation,
    sep_nonsep_ratio,
    separating_frequency,
    six_punctured_sphere_split,
)
from quadvol.stable_graphs import StableGraph, enumerate_stable_graphs, one_loop_graph, separating_graph


@pytest.fixture
def alpha1():
    return one_loop_graph(2)


@pytest.fixture
def alpha2():
    return separating_graph(1, 1)


# ---------------------------------------------------------------------------
# Normalization and the average unit ball
# ---------------------------------------------------------------------------

def test_normalization():
    assert frequency_normalization(2, 0) == 9216
    assert frequency_normalization(1, 2) == 128


def test_normalization_needs_hyperbolic_type():
    with pytest.raises(DomainError):
        frequency_normalization(1, 1)


def test_b_one_two():
    assert b_gn(1, 2) == PiMonomial(Fraction(1, 384), 4)


@pytest.mark.parametrize("n", range(4, 9))
def test_b_genus_zero(n):
    expected = PiMonomial(Fraction(1, 2 ** (2 * (n - 3)) * factorial(n - 3)), 2 * (n - 3))
    assert b_gn(0, n) == expected


def test_b_exceptional_needs_opt_in():
    with pytest.raises(DomainError):
        b_gn(2, 0)
    assert b_gn(2, 0, allow_exceptional=True) == PiMonomial(Fraction(1, 15 * 9216), 6)


def _frequency_partial_sum(g, n, bound):
    total = Fraction(0)
    for G in enumerate_stable_graphs(g, n):
        for H in product(range(1, bound + 1), repeat=G.n_edges):
            if H:
                total += c_gamma(G, H)
    return total


@pytest.mark.parametrize("g, n", [(0, 4), (0, 5), (1, 2)])
def test_frequencies_sum_towards_b(g, n):
    limit = b_gn(g, n).to_mpf()
    sums = [_frequency_partial_sum(g, n, B) for B in range(1, 5)]
    assert all(a < b for a, b in zip(sums, sums[1:]))
    assert all(mpmath.mpf(s.numerator) / s.denominator < limit for s in sums)


def test_four_punctured_sphere_frequency_sums():
    # three one-curve types, each with c = 1/(2 H^2)
    for B in range(1, 6):
        expected = Fraction(3, 2) * sum(Fraction(1, h * h) for h in range(1, B + 1))
        assert _frequency_partial_sum(0, 4, B) == expected


# ---------------------------------------------------------------------------
# Frequencies of individual multicurves
# ---------------------------------------------------------------------------

def test_genus_two_simple_curves(alpha1, alpha2):
    c1 = c_gamma(alpha1, (1,), allow_exceptional=True)
    c2 = c_gamma(alpha2, (1,), allow_exceptional=True)
    assert c1 == Fraction(1, 576)
    assert c2 == Fraction(1, 27648)
    assert c1 / c2 == 48


def test_exceptional_type_refused_by_default(alpha1):
    with pytest.raises(DomainError):
        c_gamma(alpha1, (1,))


def test_weight_scaling(alpha1):
    # Y(b^5, H) scales like H^-6
    assert c_gamma(alpha1, (2,), allow_exceptional=True) == Fraction(1, 576 * 64)


def test_c_tilde(alpha1):
    assert c_tilde(alpha1, (1,), allow_exceptional=True) == Fraction(1, 1152)


def test_frequencies_need_labeled_legs():
    G = StableGraph((0, 0), ((0, 0), (0, 0)), ((0, 1),))
    with pytest.raises(DomainError):
        c_gamma(G, (1,))


@pytest.mark.parametrize("weights", [(1, 1), (0,), (-2,)])
def test_bad_weights(alpha1, weights):
    with pytest.raises(DomainError):
        WeightedMulticurve(alpha1, weights)


def test_labeled_frequency_in_genus_zero():
    G = StableGraph((0, 0), ((1, 2), (3, 4)), ((0, 1),))
    # P = 4 b, Y(P, 1) = 4, normalization 2*2*0!*2^1 = 8
    assert c_gamma(G, (1,)) == Fraction(1, 2)


def test_report_flags_exceptional(alpha1, caplog):
    with caplog.at_level(logging.WARNING, logger="quadvol.frequencies"):
        report = frequency_report(WeightedMulticurve(alpha1, (1,)))
    assert report.flags == (EXCEPTIONAL_FLAG,)
    assert "exceptional" in caplog.text
    data = report.to_json()
    assert data["c"] == "1/576"
    assert data["flags"] == [EXCEPTIONAL_FLAG]


def test_report_without_flags():
    G = StableGraph((0, 0), ((1, 2), (3, 4)), ((0, 1),))
    report = frequency_report(WeightedMulticurve(G, (3,)))
    assert report.flags == ()
    assert report.c_gamma == Fraction(1, 18)


# ---------------------------------------------------------------------------
# Separating versus non-separating
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("g, g1", [(2, 1), (3, 1), (4, 1), (4, 2), (5, 2)])
def test_separating_closed_form_matches_pipeline(g, g1):
    assert mirzakhani_separating_frequency(g, g1) == separating_frequency(g, g1)


def test_separating_closed_form_domain():
    with pytest.raises(DomainError):
        mirzakhani_separating_frequency(3, 0)


@pytest.mark.parametrize("g, ratio", [
    (2, Fraction(1, 48)),
    (3, Fraction(5, 1776)),
    (4, Fraction(605, 790992)),
    (5, Fraction(4697, 27201408)),
    (11, Fraction(166833285883, 5360555755385245488)),
])
def test_sep_nonsep_ratio(g, ratio):
    assert sep_nonsep_ratio(g) == ratio


def test_sep_nonsep_ratio_domain():
    with pytest.raises(DomainError):
        sep_nonsep_ratio(1)


def test_sep_nonsep_deviation_shrinks():
    d20 = sep_nonsep_deviation(20)
    assert d20 < 0.15
    assert sep_nonsep_deviation(60) < d20


def test_six_punctured_sphere():
    assert six_punctured_sphere_split() == (Fraction(4, 7), Fraction(3, 7))
