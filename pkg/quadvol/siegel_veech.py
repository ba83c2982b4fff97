"""
Area Siegel-Veech constants of Q_{g,n}, two ways.

The direct formula sums Z(D_G P_G) over stable graphs, where D_G keeps, for
every edge e, the terms of P_G linear in b_e (weighted 1/2 when e is a
bridge).  The boundary formula expresses c_area * Vol Q_{g,n} through the
volumes of the boundary strata.  Both return the rational pi^2/3 * c_area.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import sympy

from .errors import ConsistencyError, DomainError
from .exact_arith import PiMonomial
from .polynomials import CylPolynomial
from .stable_graphs import StableGraph, canonical_encoding, enumerate_stable_graphs, is_bridge
from .volumes import VOLUME_0_3, masur_veech_volume, p_gamma, z_op_pi, z_op_symbolic

log = logging.getLogger(__name__)

METHODS = ("direct", "boundary", "both")


@dataclass(frozen=True)
class SiegelVeechResult:
    g: int
    n: int
    method: str
    carea_times_pi2_over3: Fraction
    breakdown: tuple[tuple[str, Fraction], ...] = field(default=(), repr=False)

    @property
    def value(self) -> Fraction:
        return self.carea_times_pi2_over3

    def to_json(self) -> dict:
        v = self.value
        return {
            "g": self.g,
            "n": self.n,
            "method": self.method,
            "num": str(v.numerator),
            "den": str(v.denominator),
            "breakdown": [{"term": t, "num": str(x.numerator), "den": str(x.denominator)} for t, x in self.breakdown],
        }


def _check_type(g: int, n: int) -> None:
    if g < 0 or n < 0 or 2 * g + n <= 3:
        raise DomainError(f"c_area needs 2g + n > 3, got (g, n) = ({g}, {n})")


def edge_weight(graph: StableGraph, index: int) -> Fraction:
    return Fraction(1, 2) if is_bridge(graph, index) else Fraction(1)


def d_gamma(graph: StableGraph, P: CylPolynomial) -> CylPolynomial:
    """sum_e chi(e) b_e dP/db_e |_{b_e = 0}, chi(e) = 1/2 on bridges."""
    if P.nvars != graph.n_edges:
        raise DomainError(f"polynomial has {P.nvars} variables, graph has {graph.n_edges} edges")
    out = CylPolynomial.zero(P.nvars)
    for edge in graph.edge_list:
        linear = P.linear_part_in(edge.index)
        if linear:
            out = out + linear * edge_weight(graph, edge.index)
    return out


def carea_direct(g: int, n: int) -> SiegelVeechResult:
    _check_type(g, n)
    vol = masur_veech_volume(g, n)
    parts = []
    total = PiMonomial.zero()
    for graph in enumerate_stable_graphs(g, n, labeled=False):
        if graph.n_edges == 0:
            continue
        term = z_op_pi(d_gamma(graph, p_gamma(graph)))
        if term.is_zero():
            continue
        total = total + term
        parts.append((canonical_encoding(graph).decode("ascii"), (term / vol).rational()))
    value = (total / vol).rational()
    log.info("direct pi^2/3 c_area(Q_{%d,%d}) = %s", g, n, value)
    return SiegelVeechResult(g, n, "direct", value, tuple(parts))


def carea_direct_symbolic(g: int, n: int):
    """sum_G Z(D_G P_G) with unevaluated correlators; equals pi^2/3 c_area Vol Q_{g,n}."""
    _check_type(g, n)
    total = sympy.Integer(0)
    for graph in enumerate_stable_graphs(g, n, labeled=False):
        if graph.n_edges:
            total += z_op_symbolic(d_gamma(graph, p_gamma(graph, symbolic=True)))
    return sympy.expand(total)


# ---------------------------------------------------------------------------
# Boundary formula
# ---------------------------------------------------------------------------

def _dim(g: int, n: int) -> int:
    return 6 * g - 6 + 2 * n


def _zeros(g: int, n: int) -> int:
    return 4 * g - 4 + n


def boundary_volume(g: int, n: int) -> PiMonomial:
    """Vol Q_{g,n} including the conventions for (0, 3) and (1, 1)."""
    return masur_veech_volume(g, n)


def _splittings(g: int, n: int):
    """Ordered (g1, n1, g2, n2) with g1 + g2 = g, n1 + n2 = n + 2, n_i >= 1, d_i >= 1."""
    for g1 in range(g + 1):
        for n1 in range(1, n + 2):
            g2, n2 = g - g1, n + 2 - n1
            if _dim(g1, n1) >= 1 and _dim(g2, n2) >= 1:
                yield g1, n1, g2, n2


def carea_boundary(g: int, n: int) -> SiegelVeechResult:
    _check_type(g, n)
    d, l = _dim(g, n), _zeros(g, n)
    parts: list[tuple[str, PiMonomial]] = []

    for g1, n1, g2, n2 in _splittings(g, n):
        d1, d2 = _dim(g1, n1), _dim(g2, n2)
        l1, l2 = _zeros(g1, n1), _zeros(g2, n2)
        coeff = (
            Fraction(factorial(l), factorial(l1) * factorial(l2))
            * Fraction(factorial(n), factorial(n1 - 1) * factorial(n2 - 1))
            * Fraction(factorial(d1 - 1) * factorial(d2 - 1), factorial(d - 1))
            / 8
        )
        parts.append((f"({g1},{n1})+({g2},{n2})", boundary_volume(g1, n1) * boundary_volume(g2, n2) * coeff))

    if n >= 2:
        if (g, n) == (0, 4):
            # both sides are (0,3): l/(d-2) -> 1/2, and the ordered pair is a single term
            ratio = Fraction(1, 2) / (d - 1) / 2
        else:
            ratio = Fraction(l, (d - 1) * (d - 2))
        coeff = Fraction(n * (n - 1), 16) * ratio
        parts.append((f"(0,3)+({g},{n - 1})", VOLUME_0_3 * boundary_volume(g, n - 1) * coeff))

    if g >= 1:
        coeff = Fraction(l * (l - 1), (d - 1) * (d - 2))
        parts.append((f"nonseparating ({g - 1},{n + 2})", boundary_volume(g - 1, n + 2) * coeff))

    vol = masur_veech_volume(g, n)
    total = sum((t for _, t in parts), PiMonomial.zero())
    # c_area * Vol = total, so pi^2/3 c_area = pi^2/3 * total / Vol
    scale = PiMonomial(Fraction(1, 3), 2) / vol
    value = (total * scale).rational()
    breakdown = tuple((name, (t * scale).rational()) for name, t in parts if not t.is_zero())
    log.info("boundary pi^2/3 c_area(Q_{%d,%d}) = %s", g, n, value)
    return SiegelVeechResult(g, n, "boundary", value, breakdown)


def carea(g: int, n: int, method: str = "both") -> dict[str, SiegelVeechResult]:
    """Run one or both methods; with "both", disagreement raises ConsistencyError."""
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
    results = {}
    if method in ("direct", "both"):
        results["direct"] = carea_direct(g, n)
    if method in ("boundary", "both"):
        results["boundary"] = carea_boundary(g, n)
    if method == "both" and results["direct"].value != results["boundary"].value:
        raise ConsistencyError(
            f"c_area(Q_{{{g},{n}}}): direct {results['direct'].value} != boundary {results['boundary'].value}"
        )
    return results


def lyapunov_sums(g: int, n: int) -> tuple[Fraction, Fraction]:
    """(Lambda^+, Lambda^-) from pi^2/3 c_area."""
    c = carea_direct(g, n).value
    plus = Fraction(5 * g - 5 - n, 18) + c
    minus = plus + Fraction(g - 1 + n, 3)
    return plus, minus
