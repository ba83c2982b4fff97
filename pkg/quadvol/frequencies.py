"""
Frequencies of simple closed multicurves.

A multicurve of type (G, H) contributes Y(P_G, H) to Vol Q_{g,n}, and

    Vol(G, H) = 2 (6g-6+2n) (4g-4+n)! 2^(4g-3+n) c(gamma).

The constant is not valid for (2, 0); absolute values there are produced
only on request and carry the "exceptional-normalization" flag.  Ratios of
frequencies in the same (g, n) never depend on it.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import mpmath

from .asymptotics import separating_volume, vol_gamma1
from .errors import DomainError
from .exact_arith import PiMonomial, working_precision
from .stable_graphs import StableGraph, canonical_encoding, one_edge_graphs, separating_graph
from .volumes import graph_volume, masur_veech_volume, p_gamma, y_op

log = logging.getLogger(__name__)

EXCEPTIONAL = {(2, 0)}
EXCEPTIONAL_FLAG = "exceptional-normalization"


@dataclass(frozen=True)
class WeightedMulticurve:
    graph: StableGraph
    weights: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.weights) != self.graph.n_edges:
            raise DomainError(f"{len(self.weights)} weights for {self.graph.n_edges} curves")
        if not self.weights:
            raise DomainError("a multicurve needs at least one curve")
        if any(h < 1 for h in self.weights):
            raise DomainError(f"weights must be positive, got {self.weights}")

    @property
    def genus(self) -> int:
        return self.graph.genus

    @property
    def n(self) -> int:
        return self.graph.n_legs


@dataclass(frozen=True)
class FrequencyReport:
    multicurve: WeightedMulticurve
    c_gamma: Fraction
    c_tilde: Fraction
    normalization: int
    flags: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "gamma": {
                "graph": canonical_encoding(self.multicurve.graph).decode("ascii"),
                "weights": list(self.multicurve.weights),
            },
            "c": f"{self.c_gamma.numerator}/{self.c_gamma.denominator}",
            "c_tilde": f"{self.c_tilde.numerator}/{self.c_tilde.denominator}",
            "normalization": self.normalization,
            "flags": list(self.flags),
        }


def frequency_normalization(g: int, n: int) -> int:
    """2 (6g-6+2n) (4g-4+n)! 2^(4g-3+n)."""
    if 2 * g + n <= 3:
        raise DomainError(f"frequencies need 2g + n > 3, got (g, n) = ({g}, {n})")
    return 2 * (6 * g - 6 + 2 * n) * factorial(4 * g - 4 + n) * 2 ** (4 * g - 3 + n)


def _check_exceptional(g: int, n: int, allow_exceptional: bool) -> None:
    if (g, n) in EXCEPTIONAL and not allow_exceptional:
        raise DomainError(
            f"absolute frequencies in Q_{{{g},{n}}} use an exceptional normalization; "
            "pass allow_exceptional=True or compare ratios"
        )


def c_gamma(graph: StableGraph, H, allow_exceptional: bool = False) -> Fraction:
    """Mirzakhani's frequency of the multicurve sum H_i gamma_i of type ``graph``."""
    curve = WeightedMulticurve(graph, H)
    g, n = curve.genus, curve.n
    if not graph.labeled:
        raise DomainError("frequencies are defined for graphs with labeled legs")
    norm = frequency_normalization(g, n)
    _check_exceptional(g, n, allow_exceptional)
    return y_op(p_gamma(graph), curve.weights) / norm


def c_tilde(graph: StableGraph, H, allow_exceptional: bool = False) -> Fraction:
    g, n = graph.genus, graph.n_legs
    return c_gamma(graph, H, allow_exceptional) / 2 ** (2 * g - 3 + n)


def frequency_report(curve: WeightedMulticurve) -> FrequencyReport:
    g, n = curve.genus, curve.n
    flags = ()
    if (g, n) in EXCEPTIONAL:
        log.warning("Q_{%d,%d}: reporting c(gamma) under the exceptional normalization", g, n)
        flags = (EXCEPTIONAL_FLAG,)
    c = c_gamma(curve.graph, curve.weights, allow_exceptional=True)
    return FrequencyReport(curve, c, c / 2 ** (2 * g - 3 + n), frequency_normalization(g, n), flags)


def b_gn(g: int, n: int, allow_exceptional: bool = False) -> PiMonomial:
    """The average Thurston measure of the unit ball, Vol Q_{g,n} / normalization."""
    norm = frequency_normalization(g, n)
    _check_exceptional(g, n, allow_exceptional)
    return masur_veech_volume(g, n) / norm


# ---------------------------------------------------------------------------
# Separating versus non-separating simple closed curves
# ---------------------------------------------------------------------------

def mirzakhani_separating_frequency(g: int, g1: int) -> Fraction:
    """Closed form for c(gamma_{g1, g - g1}) of a separating simple closed curve."""
    g2 = g - g1
    if g1 < 1 or g2 < 1:
        raise DomainError(f"a separating curve needs 1 <= g1 <= g - 1, got g = {g}, g1 = {g1}")
    aut = 2 if g1 == g2 else 1
    return Fraction(1, aut * 2 ** (3 * g - 4) * 24 ** g * factorial(g1) * factorial(g2)
                    * factorial(3 * g1 - 2) * factorial(3 * g2 - 2) * (6 * g - 6))


def separating_frequency(g: int, g1: int) -> Fraction:
    """c(gamma_{g1, g - g1}) from the generic graph pipeline."""
    return c_gamma(separating_graph(g1, g - g1), (1,), allow_exceptional=True)


def sep_nonsep_ratio(g: int) -> Fraction:
    """Frequency of all separating simple closed curves over the non-separating one."""
    if g < 2:
        raise DomainError(f"sep/nonsep ratio needs g >= 2, got {g}")
    return (separating_volume(g) / vol_gamma1(g)).rational()


def sep_nonsep_deviation(g: int) -> mpmath.mpf:
    """|ratio * 4^g * sqrt(3 pi g / 2) - 1|."""
    ratio = sep_nonsep_ratio(g)
    with working_precision(30):
        value = mpmath.mpf(ratio.numerator) / ratio.denominator
        return abs(value * mpmath.mpf(4) ** g * mpmath.sqrt(3 * mpmath.pi * g / 2) - 1)


def six_punctured_sphere_split() -> tuple[Fraction, Fraction]:
    """Shares of simple closed curves cutting six punctures 3 + 3 and 2 + 4."""
    by_split: dict[tuple[int, ...], PiMonomial] = defaultdict(PiMonomial.zero)
    for graph in one_edge_graphs(0, 6, labeled=False):
        split = tuple(sorted(len(ls) for ls in graph.legs))
        by_split[split] += graph_volume(graph)
    total = by_split[(3, 3)] + by_split[(2, 4)]
    return (by_split[(3, 3)] / total).rational(), (by_split[(2, 4)] / total).rational()
