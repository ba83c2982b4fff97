"""
Statistics of random square-tiled surfaces: how many maximal horizontal
cylinders they have, how their circumferences compare and how tall the
cylinders are.

For a graph G with cylinder circumferences b_e and heights H_e, a moment
b^alpha has expectation Y(b^alpha P_G, H) / Y(P_G, H) at fixed heights and
Z(b^alpha P_G) / Z(P_G) with the heights summed.  The latter is a quotient
of zeta products and may diverge.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Optional, Sequence

import mpmath
import sympy

from .errors import ConsistencyError, DomainError
from .exact_arith import PiMonomial, ZetaExpr, ZetaQuotient, zeta_even
from .polynomials import CylPolynomial
from .stable_graphs import StableGraph, one_edge_graphs
from .volumes import (
    p_gamma,
    simplex_integral,
    volume_breakdown,
    y_op,
    y_partial_sum,
    z_op,
    ztilde_op,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CylinderDistribution:
    g: int
    n: int
    probabilities: tuple[tuple[int, Fraction], ...]

    def __getitem__(self, k: int) -> Fraction:
        return dict(self.probabilities).get(k, Fraction(0))

    def as_tuple(self) -> tuple[Fraction, ...]:
        """p_1, p_2, ... up to the largest cylinder count."""
        top = max(k for k, _ in self.probabilities)
        return tuple(self[k] for k in range(1, top + 1))

    def mean(self) -> Fraction:
        return sum((k * p for k, p in self.probabilities), Fraction(0))


def cylinder_distribution(g: int, n: int) -> CylinderDistribution:
    probs = volume_breakdown(g, n).cylinder_probabilities()
    dist = CylinderDistribution(g, n, tuple(sorted(probs.items())))
    if sum(probs.values()) != 1:
        raise ConsistencyError(f"cylinder probabilities of Q_{{{g},{n}}} do not sum to 1")
    return dist


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def _require_cylinders(graph: StableGraph) -> None:
    if graph.n_edges == 0:
        raise DomainError(f"graph {graph} has no edges, so its surfaces have no cylinders")


@dataclass(frozen=True)
class Moment:
    """The Laurent monomial prod b_i^powers[i]."""

    powers: tuple[int, ...]

    @classmethod
    def ratio(cls, i: int, j: int, nvars: int) -> Moment:
        """b_i / b_j with 1-based edge indices."""
        if not (1 <= i <= nvars and 1 <= j <= nvars):
            raise DomainError(f"edge indices {i}, {j} outside 1..{nvars}")
        powers = [0] * nvars
        powers[i - 1] += 1
        powers[j - 1] -= 1
        return cls(tuple(powers))

    @classmethod
    def monomial(cls, powers: Sequence[int]) -> Moment:
        return cls(tuple(powers))

    @classmethod
    def parse(cls, text: str, nvars: int) -> Moment:
        """'e1/e2' or a comma-separated exponent vector such as '1,-1,0'."""
        text = text.strip()
        try:
            if "/" in text:
                a, b = (s.strip().lstrip("eb") for s in text.split("/"))
                return cls.ratio(int(a), int(b), nvars)
            powers = tuple(int(x) for x in text.split(","))
        except ValueError as exc:
            raise DomainError(f"cannot parse moment {text!r}") from exc
        if len(powers) != nvars:
            raise DomainError(f"moment {text!r} has {len(powers)} entries, graph has {nvars} edges")
        return cls(powers)

    @property
    def degree(self) -> int:
        return sum(self.powers)

    def apply(self, P: CylPolynomial) -> CylPolynomial:
        """b^alpha * P; every resulting exponent must stay nonnegative."""
        if len(self.powers) != P.nvars:
            raise DomainError(f"moment has {len(self.powers)} entries, polynomial has {P.nvars} variables")
        out = {}
        for exps, c in P.items():
            shifted = tuple(m + a for m, a in zip(exps, self.powers))
            if min(shifted, default=0) < 0:
                raise DomainError(f"moment {self.powers} makes exponent vector {shifted} negative")
            out[shifted] = c
        return CylPolynomial(P.nvars, out)


@dataclass(frozen=True)
class ExpectationQuery:
    graph: StableGraph
    moment: Moment
    heights: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        _require_cylinders(self.graph)
        if len(self.moment.powers) != self.graph.n_edges:
            raise DomainError(f"moment addresses {len(self.moment.powers)} edges, graph has {self.graph.n_edges}")
        if self.heights is not None:
            object.__setattr__(self, "heights", tuple(self.heights))
            if len(self.heights) != self.graph.n_edges:
                raise DomainError(f"{len(self.heights)} heights for {self.graph.n_edges} edges")


def expectation(query: ExpectationQuery) -> Fraction | ZetaQuotient:
    """
    Fraction for fixed heights; ZetaQuotient (possibly divergent) when the
    heights are summed.
    """
    P = p_gamma(query.graph)
    MP = query.moment.apply(P)
    if query.heights is not None:
        return y_op(MP, query.heights) / y_op(P, query.heights)
    result = ZetaQuotient(z_op(MP), z_op(P))
    if result.is_divergent():
        log.info("expectation of %s on %s diverges", query.moment.powers, query.graph)
    return result


def normalized_moment(graph: StableGraph, powers: Sequence[int], heights: Sequence[int]) -> Fraction:
    """Moment of the normalized lengths x on the simplex under the density Ztilde(P_G, H)."""
    _require_cylinders(graph)
    density = ztilde_op(p_gamma(graph), heights)
    shifted = Moment.monomial(powers).apply(density)
    return simplex_integral(shifted) / simplex_integral(density)


def expectation_in_heights(graph: StableGraph, moment: Moment):
    """The fixed-height expectation as a rational function of symbols H1..Hk."""
    _require_cylinders(graph)
    k = graph.n_edges
    H = sympy.symbols(f"H1:{k + 1}", positive=True)
    P = p_gamma(graph)

    def y_symbolic(Q: CylPolynomial):
        return sum(
            sympy.Rational(Fraction(c).numerator, Fraction(c).denominator)
            * prod(sympy.Integer(factorial(m)) / h ** (m + 1) for m, h in zip(exps, H))
            for exps, c in Q.items()
        )

    return sympy.factor(sympy.cancel(y_symbolic(moment.apply(P)) / y_symbolic(P)))


# ---------------------------------------------------------------------------
# Heights
# ---------------------------------------------------------------------------

def bounded_height_probability(graph: StableGraph, bound: int) -> ZetaQuotient:
    """Probability that every cylinder of a surface of type ``graph`` has height <= bound."""
    if bound < 1:
        raise DomainError(f"height bound must be >= 1, got {bound}")
    _require_cylinders(graph)
    P = p_gamma(graph)
    return ZetaQuotient(ZetaExpr.constant(y_partial_sum(P, bound)), z_op(P))


def height_one_probability(g: int, n: int) -> tuple[PiMonomial, mpmath.mpf]:
    """Probability that a one-cylinder square-tiled surface in Q_{g,n} has height 1, exact and numeric."""
    graphs = one_edge_graphs(g, n, labeled=False)
    if not graphs:
        raise DomainError(f"Q_{{{g},{n}}} has no one-cylinder surfaces")
    num = sum((y_op(p_gamma(G), (1,)) for G in graphs), Fraction(0))
    den = sum((z_op(p_gamma(G)) for G in graphs), ZetaExpr())
    value = ZetaQuotient(ZetaExpr.constant(num), den).exact()
    expected = 1 / zeta_even(6 * g - 6 + 2 * n)
    if value != expected:
        raise ConsistencyError(f"height-one probability {value} differs from 1/zeta({6 * g - 6 + 2 * n})")
    return value, value.to_mpf()
