import pytest
import sys, os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from fractions import Fraction

import sympy

from quadvol.correlators import correlator_symbol
from quadvol.errors import DomainError
from quadvol.polynomials import CylPolynomial
from quadvol.siegel_veech import (
    carea,
    carea_boundary,
    carea_direct,
    carea_direct_symbolic,
    d_gamma,
    edge_weight,
    lyapunov_sums,
)
from quadvol.stable_graphs import StableGraph
from quadvol.volumes import p_gamma


CAREA_TABLE = [
    (0, 4, Fraction(1, 2)),
    (0, 5, Fraction(5, 9)),
    (0, 6, Fraction(11, 18)),
    (0, 7, Fraction(2, 3)),
    (1, 2, Fraction(7, 9)),
    (1, 3, Fraction(47, 66)),
    (1, 4, Fraction(44, 63)),
    (1, 5, Fraction(2075, 2934)),
    (2, 0, Fraction(19, 18)),
    (2, 1, Fraction(230, 261)),
    (2, 2, Fraction(8131, 10110)),
    (3, 0, Fraction(24199, 25875)),
]

SWEEP = [(g, n) for g in range(4) for n in range(12) if 2 * g + n > 3 and 6 * g - 6 + 2 * n <= 16]

SWEEP_VALUES = {
    (0, 8): Fraction(13, 18),
    (1, 6): Fraction(697, 957),
    (2, 3): Fraction(11041, 14355),
    (3, 2): Fraction(2843354, 3493485),
}


# ---------------------------------------------------------------------------
# The derivative-like operator
# ---------------------------------------------------------------------------

def test_edge_weights():
    G = StableGraph((0, 1), ((), ()), ((0, 0), (0, 1)))
    assert edge_weight(G, 0) == 1
    assert edge_weight(G, 1) == Fraction(1, 2)


def test_d_gamma_keeps_linear_terms():
    G = StableGraph((0, 1), ((), ()), ((0, 0), (0, 1)))
    assert d_gamma(G, p_gamma(G)) == CylPolynomial.monomial((1, 3), Fraction(2, 15))


def test_d_gamma_halves_bridge_terms():
    G = StableGraph((1, 1), ((), ()), ((0, 1),))
    P = CylPolynomial.monomial((1,), 6)
    assert d_gamma(G, P) == CylPolynomial.monomial((1,), 3)


def test_d_gamma_checks_dimensions():
    G = StableGraph((0,), ((),), ((0, 0), (0, 0)))
    with pytest.raises(DomainError):
        d_gamma(G, CylPolynomial.monomial((1,)))


# ---------------------------------------------------------------------------
# Table values, both methods
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("g, n, expected", CAREA_TABLE)
def test_direct_formula(g, n, expected):
    assert carea_direct(g, n).value == expected


@pytest.mark.parametrize("g, n, expected", CAREA_TABLE)
def test_boundary_formula(g, n, expected):
    assert carea_boundary(g, n).value == expected


def test_four_zero():
    assert carea_direct(4, 0).value == Fraction(283794163, 315936150)


@pytest.mark.parametrize("g, n", SWEEP)
def test_methods_agree_in_low_dimension(g, n):
    direct, boundary = carea_direct(g, n).value, carea_boundary(g, n).value
    assert direct == boundary
    if (g, n) in SWEEP_VALUES:
        assert direct == SWEEP_VALUES[g, n]


@pytest.mark.parametrize("n", range(5, 10))
def test_genus_zero_lambda_plus_vanishes(n):
    plus, minus = lyapunov_sums(0, n)
    assert plus == 0
    assert minus == Fraction(n - 1, 3)


@pytest.mark.parametrize("g, n, plus, minus", [
    (2, 0, Fraction(4, 3), Fraction(5, 3)),
    (0, 5, Fraction(0), Fraction(4, 3)),
    (4, 0, Fraction(91179048, 52656025), Fraction(91179048, 52656025) + 1),
])
def test_lyapunov_sums(g, n, plus, minus):
    assert lyapunov_sums(g, n) == (plus, minus)


def test_both_methods_agree():
    results = carea(1, 3, "both")
    assert set(results) == {"direct", "boundary"}
    assert results["direct"].value == results["boundary"].value


def test_single_method():
    assert set(carea(2, 0, "boundary")) == {"boundary"}


def test_unknown_method():
    with pytest.raises(DomainError):
        carea(2, 0, "magic")


@pytest.mark.parametrize("g, n", [(0, 3), (1, 1), (0, 2)])
def test_excluded_types(g, n):
    with pytest.raises(DomainError):
        carea_direct(g, n)


# ---------------------------------------------------------------------------
# Breakdowns and serialization
# ---------------------------------------------------------------------------

def test_direct_breakdown_sums_to_total():
    result = carea_direct(2, 0)
    assert sum(x for _, x in result.breakdown) == result.value


def test_boundary_breakdown_sums_to_total():
    result = carea_boundary(2, 1)
    assert sum(x for _, x in result.breakdown) == result.value
    assert any(name.startswith("nonseparating") for name, _ in result.breakdown)


def test_result_json():
    data = carea_direct(1, 2).to_json()
    assert data["method"] == "direct"
    assert (data["num"], data["den"]) == ("7", "9")


def test_symbolic_zero_five():
    b = correlator_symbol(0, (0, 0, 0))
    expr = carea_direct_symbolic(0, 5)
    assert sympy.expand(expr - sympy.Rational(5, 9) * sympy.pi ** 4 * b ** 3) == 0
