import pytest
import sys, os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from fractions import Fraction
from itertools import product

import mpmath
import sympy
from hypothesis import given, settings, strategies as st

from quadvol.correlators import correlator_symbol, psi_correlator
from quadvol.errors import DomainError
from quadvol.exact_arith import PiMonomial, ZetaExpr
from quadvol.polynomials import CylPolynomial
from quadvol.stable_graphs import StableGraph
from quadvol.volumes import (
    cylinder_polynomial,
    graph_contribution,
    graph_probability,
    kontsevich_poly,
    masur_veech_volume,
    masur_veech_volume_symbolic,
    p_gamma,
    simplex_integral,
    volume_breakdown,
    volume_prefactor,
    y_op,
    y_partial_sum,
    z_op,
    z_op_pi,
    ztilde_op,
)


@pytest.fixture
def phi1():
    # b1 is the loop at the genus-0 vertex, b2 joins it to the genus-1 vertex
    return StableGraph((0, 1), ((), ()), ((0, 0), (0, 1)))


@pytest.fixture
def phi2():
    return StableGraph((0,), ((),), ((0, 0), (0, 0)))


# ---------------------------------------------------------------------------
# Kontsevich polynomials
# ---------------------------------------------------------------------------

def test_kontsevich_small_cases():
    assert kontsevich_poly(0, 3) == CylPolynomial.constant(3, 1)
    assert kontsevich_poly(1, 1) == CylPolynomial.monomial((2,), Fraction(1, 48))
    b = [CylPolynomial.variable(i, 4) for i in range(4)]
    assert kontsevich_poly(0, 4) == sum((x * x for x in b), CylPolynomial.zero(4)) * Fraction(1, 4)


def test_kontsevich_one_two():
    b1, b2 = CylPolynomial.variable(0, 2), CylPolynomial.variable(1, 2)
    assert kontsevich_poly(1, 2) == (b1 * b1 + b2 * b2) ** 2 * Fraction(1, 384)


@pytest.mark.parametrize("g, n", [(0, 5), (1, 3), (2, 2), (3, 1)])
def test_kontsevich_homogeneous_even_symmetric(g, n):
    N = kontsevich_poly(g, n)
    assert N.is_homogeneous()
    assert N.total_degree() == 6 * g - 6 + 2 * n
    assert N.all_exponents(lambda e: e % 2 == 0)
    for exps, c in N.items():
        assert N.coefficient(tuple(reversed(exps))) == c


def test_kontsevich_rejects_unstable():
    with pytest.raises(DomainError):
        kontsevich_poly(0, 2)


def test_prefactor():
    assert volume_prefactor(2, 0) == Fraction(2 ** 7 * 24, 120)
    with pytest.raises(DomainError):
        volume_prefactor(0, 3)


# ---------------------------------------------------------------------------
# Graph polynomials
# ---------------------------------------------------------------------------

def test_p_gamma_examples(phi1, phi2):
    assert p_gamma(phi1) == CylPolynomial.monomial((1, 3), Fraction(2, 15))
    assert p_gamma(phi2) == CylPolynomial(2, {(3, 1): Fraction(8, 5), (1, 3): Fraction(8, 5)})


def test_p_gamma_edgeless_graph_is_zero():
    assert p_gamma(StableGraph((2,), ((),), ())) == 0


def test_p_gamma_one_loop_one_one():
    assert p_gamma(StableGraph((0,), ((1,),), ((0, 0),))) == CylPolynomial.monomial((1,), 4)


def test_leg_blind_polynomial_matches_labeled_sum():
    # three labeled ways to put two of four legs on each side of one edge
    blind = StableGraph((0, 0), ((0, 0), (0, 0)), ((0, 1),))
    labeled = [
        StableGraph((0, 0), ((1, 2), (3, 4)), ((0, 1),)),
        StableGraph((0, 0), ((1, 3), (2, 4)), ((0, 1),)),
        StableGraph((0, 0), ((1, 4), (2, 3)), ((0, 1),)),
    ]
    assert p_gamma(blind) == sum((p_gamma(G) for G in labeled[1:]), p_gamma(labeled[0]))


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

def test_z_op(phi2):
    assert z_op(p_gamma(phi2)) == ZetaExpr.zeta(2, 4, coeff=Fraction(96, 5))
    assert z_op_pi(p_gamma(phi2)) == PiMonomial(Fraction(8, 225), 6)


def test_z_op_pi_rejects_odd_zeta():
    with pytest.raises(DomainError):
        z_op_pi(CylPolynomial.monomial((2,)))


def test_y_op():
    P = CylPolynomial.monomial((1, 3), Fraction(2, 15))
    assert y_op(P, (1, 2)) == Fraction(2, 15) * 1 * Fraction(6, 16)


@pytest.mark.parametrize("H", [(1,), (0, 1), (1, -1)])
def test_y_op_rejects_bad_heights(H):
    with pytest.raises(DomainError):
        y_op(CylPolynomial.monomial((1, 1)), H)


def test_y_partial_sum_counts_every_height_vector():
    P = CylPolynomial.monomial((1, 1))
    expected = sum(Fraction(1, a * a * b * b) for a, b in product(range(1, 4), repeat=2))
    assert y_partial_sum(P, 3) == expected


@pytest.mark.parametrize("graph", ["phi1", "phi2"])
def test_y_partial_sums_increase_towards_z(graph, request):
    P = p_gamma(request.getfixturevalue(graph))
    limit = z_op_pi(P).to_mpf()
    sums = [y_partial_sum(P, N) for N in range(1, 9)]
    assert all(a < b for a, b in zip(sums, sums[1:]))
    gaps = [limit - mpmath.mpf(s.numerator) / s.denominator for s in sums]
    assert all(gap > 0 for gap in gaps)
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_simplex_integral_matches_sympy():
    x, y = sympy.symbols("x y", nonnegative=True)
    Q = CylPolynomial(2, {(2, 1): Fraction(3), (0, 0): Fraction(1)})
    exact = sympy.integrate(sympy.integrate(3 * x**2 * y + 1, (y, 0, 1 - x)), (x, 0, 1))
    assert simplex_integral(Q) == Fraction(int(exact.p), int(exact.q))


_small_polys = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 4)),
    st.fractions(min_value=-5, max_value=5, max_denominator=7),
    min_size=1, max_size=4,
).map(lambda t: CylPolynomial(2, t))


@settings(max_examples=50, deadline=None)
@given(_small_polys, st.tuples(st.integers(1, 4), st.integers(1, 4)))
def test_ztilde_integrates_to_y(P, H):
    assert simplex_integral(ztilde_op(P, H)) == y_op(P, H)


@settings(max_examples=30, deadline=None)
@given(_small_polys, _small_polys)
def test_z_op_is_linear(P, Q):
    assert z_op(P + Q) == z_op(P) + z_op(Q)


# ---------------------------------------------------------------------------
# Volumes
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("g, n, coeff, pi_exp", [
    (0, 4, Fraction(2), 2),
    (0, 5, Fraction(1), 4),
    (0, 6, Fraction(1, 2), 6),
    (0, 7, Fraction(1, 4), 8),
    (1, 1, Fraction(2, 3), 2),
    (1, 2, Fraction(1, 3), 4),
    (1, 3, Fraction(11, 60), 6),
    (1, 4, Fraction(1, 10), 8),
    (1, 5, Fraction(163, 3024), 10),
    (2, 0, Fraction(1, 15), 6),
    (2, 1, Fraction(29, 840), 8),
    (2, 2, Fraction(337, 18144), 10),
    (3, 0, Fraction(115, 33264), 12),
    (4, 0, Fraction(2106241, 11548293120), 18),
])
def test_volume_table(g, n, coeff, pi_exp):
    assert masur_veech_volume(g, n) == PiMonomial(coeff, pi_exp)


@pytest.mark.parametrize("n", range(4, 11))
def test_genus_zero_closed_form(n):
    assert masur_veech_volume(0, n) == PiMonomial(Fraction(2) ** (5 - n), 2 * n - 6)


def test_zero_three_convention():
    assert masur_veech_volume(0, 3) == PiMonomial(4)


@pytest.mark.parametrize("g, n", [(0, 2), (1, 0), (0, -1)])
def test_unstable_volume_raises(g, n):
    with pytest.raises(DomainError):
        masur_veech_volume(g, n)


def test_two_zero_graph_contributions():
    report = volume_breakdown(2, 0)
    vols = sorted(c.volume.coeff for c in report.contributions if not c.volume.is_zero())
    assert vols == sorted([
        Fraction(16, 945), Fraction(1, 2835), Fraction(8, 225),
        Fraction(1, 675), Fraction(1, 135), Fraction(2, 405),
    ])
    assert all(c.volume.pi_exp == 6 for c in report.contributions if not c.volume.is_zero())


def test_one_two_graph_contributions():
    report = volume_breakdown(1, 2, labeled=True)
    vols = sorted(c.volume.coeff for c in report.contributions if c.cylinder_count)
    assert vols == sorted([Fraction(8, 45), Fraction(1, 135), Fraction(2, 27), Fraction(2, 27)])


def test_by_cylinders():
    assert volume_breakdown(2, 0).by_cylinders == {
        1: PiMonomial(Fraction(7, 405), 6),
        2: PiMonomial(Fraction(1, 27), 6),
        3: PiMonomial(Fraction(1, 81), 6),
    }


def test_labeled_and_leg_blind_totals_agree():
    for g, n in [(0, 6), (1, 3), (2, 1)]:
        assert volume_breakdown(g, n, labeled=True).total == volume_breakdown(g, n).total


def test_worker_pool_gives_the_same_total():
    report = volume_breakdown(1, 4, labeled=True, workers=4)
    assert report.total == PiMonomial(Fraction(1, 10), 8)
    assert [c.encoding for c in report.contributions] == sorted(
        (c.encoding for c in report.contributions), key=lambda e: (e.count("-"), e.encode())
    )


def test_contribution_json(phi1):
    data = graph_contribution(phi1).to_json()
    assert data["aut"] == 2
    assert data["cylinders"] == 2
    assert data["vol"] == {"num": "1", "den": "675", "pi_exp": 6}


def test_graph_probability(phi1):
    assert graph_probability(phi1) == Fraction(1, 45)


def test_report_json_structure():
    data = volume_breakdown(1, 2).to_json()
    assert data["total"] == {"num": "1", "den": "3", "pi_exp": 4}
    assert set(data["by_cylinders"]) == {"1", "2"}


@pytest.mark.parametrize("n, expected", [
    (5, {1: Fraction(4, 9), 2: Fraction(5, 9)}),
    (6, {1: Fraction(8, 27), 2: Fraction(4, 9), 3: Fraction(7, 27)}),
    (7, {1: Fraction(16, 75), 2: Fraction(256, 675), 3: Fraction(8, 27), 4: Fraction(1, 9)}),
])
def test_cylinder_polynomial_genus_zero(n, expected):
    t = sympy.Symbol("t")
    poly = cylinder_polynomial(0, n)
    target = sum(sympy.Rational(p.numerator, p.denominator) * t ** k for k, p in expected.items())
    assert sympy.expand(poly.as_expr() - target) == 0


# ---------------------------------------------------------------------------
# Unevaluated correlators
# ---------------------------------------------------------------------------

def test_symbolic_volume_zero_five():
    a = correlator_symbol(0, (0, 0, 0, 1))
    b = correlator_symbol(0, (0, 0, 0))
    expr = masur_veech_volume_symbolic(0, 5)
    target = sympy.pi ** 4 / 9 * (4 * a * b + 5 * b ** 3)
    assert sympy.expand(expr - target) == 0


@pytest.mark.parametrize("g, n", [(0, 6), (1, 2), (2, 0)])
def test_symbolic_volume_evaluates_to_exact(g, n):
    expr = masur_veech_volume_symbolic(g, n)
    values = {}
    for sym in expr.free_symbols:
        if sym.name.startswith("<"):
            inner, genus = sym.name[1:].split(">_")
            d = [int(tok.split("_")[1]) for tok in inner.split()]
            v = psi_correlator(int(genus), d)
            values[sym] = sympy.Rational(v.numerator, v.denominator)
    exact = masur_veech_volume(g, n)
    target = sympy.Rational(exact.coeff.numerator, exact.coeff.denominator) * sympy.pi ** exact.pi_exp
    assert sympy.simplify(expr.subs(values) - target) == 0
