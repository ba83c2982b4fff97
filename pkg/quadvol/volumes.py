"""
Masur-Veech volumes Vol Q_{g,n} as sums of stable-graph contributions.

Every stable graph G contributes Z(P_G), where

    P_G = 2^(6g-5+2n) (4g-4+n)! / (6g-7+2n)! * 1/2^(|V|-1) * 1/|Aut G|
          * prod_e b_e * prod_v N_{g_v,n_v}(b_v)

and N_{g,n} is the top-degree Kontsevich polynomial.  Legs enter N with
argument 0, a loop enters its vertex twice.  The operator Z sends
prod b_i^m_i to prod m_i! zeta(m_i + 1); Y(H) sends it to
prod m_i! / H_i^(m_i + 1).
"""
from __future__ import annotations

import logging
import threading
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import factorial, prod
from typing import Iterator, Sequence

import sympy

from .correlators import correlator_symbol, psi_correlator
from .errors import DomainError
from .exact_arith import PiMonomial, ZetaExpr, zeta_even
from .polynomials import CylPolynomial
from .stable_graphs import StableGraph, aut_order, canonical_encoding, enumerate_stable_graphs

log = logging.getLogger(__name__)

# Vol Q_{0,3} and Vol Q_{1,1} under the limit conventions
VOLUME_0_3 = PiMonomial(Fraction(4), 0)
VOLUME_1_1 = PiMonomial(Fraction(2, 3), 2)


def _check_type(g: int, n: int) -> None:
    if g < 0 or n < 0 or 2 * g + n <= 2:
        raise DomainError(f"(g, n) = ({g}, {n}) is not a stable type")


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Ordered tuples of ``parts`` nonnegative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for bars in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 2 - prev)
        yield tuple(out)


# ---------------------------------------------------------------------------
# Kontsevich polynomials and P_G
# ---------------------------------------------------------------------------

def _kontsevich_terms(g: int, n: int, correlator) -> dict[tuple[int, ...], object]:
    dim = 3 * g - 3 + n
    scale = 2 ** (5 * g - 6 + 2 * n)
    terms = {}
    for d in _compositions(dim, n):
        value = correlator(g, d)
        if value != 0:
            terms[tuple(2 * x for x in d)] = value * _reciprocal(value, scale * prod(factorial(x) for x in d))
    return terms


def _reciprocal(value, denominator: int):
    if isinstance(value, sympy.Basic):
        return sympy.Rational(1, denominator)
    return Fraction(1, denominator)


@lru_cache(maxsize=None)
def kontsevich_poly(g: int, n: int) -> CylPolynomial:
    """N_{g,n}(b_1, ..., b_n), homogeneous of degree 6g - 6 + 2n."""
    if g < 0 or n < 1 or 2 * g - 2 + n <= 0:
        raise DomainError(f"N_{{g,n}} needs a stable (g, n) with n >= 1, got ({g}, {n})")
    return CylPolynomial(n, _kontsevich_terms(g, n, psi_correlator))


@lru_cache(maxsize=None)
def kontsevich_poly_symbolic(g: int, n: int) -> CylPolynomial:
    """N_{g,n} with the correlators left as sympy symbols."""
    if g < 0 or n < 1 or 2 * g - 2 + n <= 0:
        raise DomainError(f"N_{{g,n}} needs a stable (g, n) with n >= 1, got ({g}, {n})")
    return CylPolynomial(n, _kontsevich_terms(g, n, correlator_symbol))


def volume_prefactor(g: int, n: int) -> Fraction:
    """2^(6g-5+2n) (4g-4+n)! / (6g-7+2n)!"""
    if (g, n) == (0, 3):
        raise DomainError("the prefactor is undefined for (0, 3); use the convention Vol Q_{0,3} = 4")
    return Fraction(2 ** (6 * g - 5 + 2 * n) * factorial(4 * g - 4 + n), factorial(6 * g - 7 + 2 * n))


def p_gamma(graph: StableGraph, symbolic: bool = False) -> CylPolynomial:
    """The polynomial P_G in the edge variables b_1, ..., b_|E|."""
    g, n = graph.genus, graph.n_legs
    E = graph.n_edges
    if (g, n) == (0, 3):
        return CylPolynomial.constant(0, VOLUME_0_3.coeff)
    if E == 0:
        return CylPolynomial.zero(0)
    scalar = volume_prefactor(g, n) * graph.weight() / 2 ** (graph.n_vertices - 1)
    if symbolic:
        scalar = sympy.Rational(scalar.numerator, scalar.denominator)
    poly = CylPolynomial.monomial((1,) * E, scalar)
    N = kontsevich_poly_symbolic if symbolic else kontsevich_poly
    for v, gv in enumerate(graph.genera):
        args = graph.vertex_arguments(v)
        poly = poly * N(gv, len(args)).embed(args, E)
        if not poly:
            break
    return poly


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _zeta_even_cached(s: int) -> PiMonomial:
    return zeta_even(s)


def z_op(P: CylPolynomial) -> ZetaExpr:
    """prod b_i^m_i -> prod m_i! zeta(m_i + 1), extended linearly."""
    terms: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for exps, c in P.items():
        terms[tuple(sorted(m + 1 for m in exps))] += Fraction(c) * prod(factorial(m) for m in exps)
    return ZetaExpr(terms)


def _z_factor(exps: Sequence[int]) -> PiMonomial:
    factor = PiMonomial(Fraction(prod(factorial(m) for m in exps)))
    for m in exps:
        if m % 2 == 0:
            raise DomainError(f"exponent {m} gives zeta({m + 1}); no exact pi value")
        factor = factor * _zeta_even_cached(m + 1)
    return factor


def z_op_pi(P: CylPolynomial) -> PiMonomial:
    """Z(P) as an exact multiple of a power of pi; every exponent must be odd."""
    return sum((_z_factor(exps) * Fraction(c) for exps, c in P.items()), PiMonomial.zero())


def z_op_symbolic(P: CylPolynomial):
    """Z(P) for a polynomial whose coefficients are sympy expressions."""
    total = sympy.Integer(0)
    for exps, c in P.items():
        f = _z_factor(exps)
        total += c * sympy.Rational(f.coeff.numerator, f.coeff.denominator) * sympy.pi ** f.pi_exp
    return sympy.expand(total)


def y_op(P: CylPolynomial, H: Sequence[int]) -> Fraction:
    """prod b_i^m_i -> prod m_i! / H_i^(m_i + 1) for fixed positive heights."""
    if len(H) != P.nvars:
        raise DomainError(f"{len(H)} heights given for {P.nvars} variables")
    if any(h < 1 for h in H):
        raise DomainError(f"heights must be positive, got {tuple(H)}")
    total = Fraction(0)
    for exps, c in P.items():
        total += Fraction(c) * prod(Fraction(factorial(m), h ** (m + 1)) for m, h in zip(exps, H))
    return total


def y_partial_sum(P: CylPolynomial, bound: int) -> Fraction:
    """Sum of Y(P, H) over all H in {1..bound}^k."""
    return sum((y_op(P, H) for H in product(range(1, bound + 1), repeat=P.nvars)), Fraction(0))


def ztilde_op(P: CylPolynomial, H: Sequence[int]) -> CylPolynomial:
    """
    Density in the normalized lengths x on the simplex sum x_i <= 1:
    c (|m| + k)! prod x_i^m_i / H_i^(m_i + 1).
    """
    if len(H) != P.nvars:
        raise DomainError(f"{len(H)} heights given for {P.nvars} variables")
    k = P.nvars
    out = {}
    for exps, c in P.items():
        weight = prod(Fraction(1, h ** (m + 1)) for m, h in zip(exps, H))
        out[exps] = Fraction(c) * factorial(sum(exps) + k) * weight
    return CylPolynomial(k, out)


def simplex_integral(Q: CylPolynomial) -> Fraction:
    """Integral over {x_i >= 0, sum x_i <= 1}: x^m -> prod m_i! / (|m| + k)!."""
    k = Q.nvars
    return sum(
        (Fraction(c) * Fraction(prod(factorial(m) for m in exps), factorial(sum(exps) + k)) for exps, c in Q.items()),
        Fraction(0),
    )


# ---------------------------------------------------------------------------
# Volumes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GraphContribution:
    graph: StableGraph
    polynomial: CylPolynomial
    volume: PiMonomial

    @property
    def cylinder_count(self) -> int:
        return self.graph.n_edges

    @property
    def aut(self) -> int:
        return aut_order(self.graph)

    @property
    def encoding(self) -> str:
        return canonical_encoding(self.graph).decode("ascii")

    def to_json(self) -> dict:
        return {
            "graph": self.encoding,
            "aut": self.aut,
            "cylinders": self.cylinder_count,
            "polynomial": self.polynomial.to_json(),
            "vol": self.volume.to_json(),
        }


def graph_contribution(graph: StableGraph) -> GraphContribution:
    P = p_gamma(graph)
    vol = z_op_pi(P)
    log.debug("Vol(%s) = %s", graph, vol)
    return GraphContribution(graph, P, vol)


def graph_volume(graph: StableGraph) -> PiMonomial:
    return graph_contribution(graph).volume


@dataclass(frozen=True)
class VolumeReport:
    g: int
    n: int
    labeled: bool
    contributions: tuple[GraphContribution, ...] = field(repr=False)

    @property
    def total(self) -> PiMonomial:
        return sum((c.volume for c in self.contributions), PiMonomial.zero())

    @property
    def by_cylinders(self) -> dict[int, PiMonomial]:
        groups: dict[int, PiMonomial] = {}
        for c in self.contributions:
            groups[c.cylinder_count] = groups.get(c.cylinder_count, PiMonomial.zero()) + c.volume
        return {k: groups[k] for k in sorted(groups) if not groups[k].is_zero()}

    def cylinder_probabilities(self) -> dict[int, Fraction]:
        total = self.total
        return {k: (v / total).rational() for k, v in self.by_cylinders.items()}

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "n": self.n,
            "labeled": self.labeled,
            "total": self.total.to_json(),
            "by_cylinders": {str(k): v.to_json() for k, v in self.by_cylinders.items()},
            "graphs": [c.to_json() for c in self.contributions],
        }


_REPORTS: dict[tuple[int, int, bool], VolumeReport] = {}
_REPORTS_LOCK = threading.Lock()


def _breakdown(g: int, n: int, labeled: bool, workers: int) -> VolumeReport:
    graphs = enumerate_stable_graphs(g, n, labeled=labeled)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            contributions = tuple(pool.map(graph_contribution, graphs))
    else:
        contributions = tuple(map(graph_contribution, graphs))
    report = VolumeReport(g, n, labeled, contributions)
    log.info("Vol Q_{%d,%d} = %s from %d graphs", g, n, report.total, len(graphs))
    with _REPORTS_LOCK:
        return _REPORTS.setdefault((g, n, labeled), report)


def volume_breakdown(g: int, n: int, labeled: bool = False, workers: int = 1) -> VolumeReport:
    """
    Per-graph contributions to Vol Q_{g,n}.  The leg-blind sum (the default)
    gives the same totals as the labeled one with far fewer graphs.
    """
    _check_type(g, n)
    cached = _REPORTS.get((g, n, labeled))
    if cached is not None:
        return cached
    return _breakdown(g, n, labeled, workers)


def masur_veech_volume(g: int, n: int, workers: int = 1) -> PiMonomial:
    """Vol Q_{g,n}, with Vol Q_{0,3} = 4 and Vol Q_{1,1} = 2 pi^2 / 3."""
    _check_type(g, n)
    if (g, n) == (0, 3):
        return VOLUME_0_3
    total = volume_breakdown(g, n, workers=workers).total
    if total.pi_exp != 6 * g - 6 + 2 * n:
        raise DomainError(f"unexpected power of pi in Vol Q_{{{g},{n}}}: {total}")
    return total


def masur_veech_volume_symbolic(g: int, n: int):
    """Vol Q_{g,n} as a polynomial in unevaluated correlators (a sympy expression)."""
    _check_type(g, n)
    graphs = enumerate_stable_graphs(g, n, labeled=False)
    return sympy.expand(sum((z_op_symbolic(p_gamma(G, symbolic=True)) for G in graphs), sympy.Integer(0)))


def graph_probability(graph: StableGraph) -> Fraction:
    """Share of Vol Q_{g,n} carried by the graph."""
    return (graph_volume(graph) / masur_veech_volume(graph.genus, graph.n_legs)).rational()


def cylinder_polynomial(g: int, n: int) -> sympy.Poly:
    """sum_k p_k t^k, where p_k is the share of k-cylinder square-tiled surfaces."""
    t = sympy.Symbol("t")
    probs = volume_breakdown(g, n).cylinder_probabilities()
    expr = sum((sympy.Rational(p.numerator, p.denominator) * t ** k for k, p in probs.items()), sympy.Integer(0))
    return sympy.Poly(expr, t)
