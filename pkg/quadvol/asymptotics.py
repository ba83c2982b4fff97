"""
Normalized two-point correlators and the large-genus closed forms.

    a_{g,k} = 24^g g! (2k+1)!! (6g-1-2k)!! / (6g-1)!! * <tau_k tau_{3g-1-k}>_g

satisfy a_{g,0} = 1, the symmetry a_{g,k} = a_{g,3g-1-k} and an explicit
formula for the consecutive differences.  They give closed forms for the
contribution of the one-loop graph, and the binomial sum S(g) gives the
separating one-edge graphs.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath

from .correlators import psi_correlator, two_point_row
from .errors import ConsistencyError, DomainError
from .exact_arith import PiMonomial, double_factorial, working_precision, zeta_even
from .volumes import masur_veech_volume

log = logging.getLogger(__name__)

DIAGNOSTIC_DIGITS = 30


@dataclass(frozen=True)
class TwoCorrelatorRow:
    g: int
    values: tuple[Fraction, ...]

    def __getitem__(self, k: int) -> Fraction:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)

    def lower_bound(self) -> Fraction:
        return 1 - Fraction(2, 6 * self.g - 1)

    def to_csv_rows(self) -> list[tuple[int, int, Fraction]]:
        return [(self.g, k, a) for k, a in enumerate(self.values)]


def _difference(g: int, k: int) -> Fraction:
    """a_{g,k+1} - a_{g,k}."""
    scale = Fraction(double_factorial(6 * g - 3 - 2 * k), double_factorial(6 * g - 1))
    j, r = divmod(k + 1, 3)
    if r == 0:
        # k = 3j - 1
        body = Fraction(double_factorial(6 * j - 1) * factorial(g - 1) * (g - 2 * j), factorial(j) * factorial(g - j))
    elif r == 1:
        # k = 3j
        body = Fraction(-2 * double_factorial(6 * j + 1) * factorial(g - 1), factorial(j) * factorial(g - 1 - j))
    else:
        # k = 3j + 1
        body = Fraction(2 * double_factorial(6 * j + 3) * factorial(g - 1), factorial(j) * factorial(g - 1 - j))
    return scale * body


@lru_cache(maxsize=None)
def a_gk_row(g: int) -> TwoCorrelatorRow:
    if g < 1:
        raise DomainError(f"a_{{g,k}} needs g >= 1, got {g}")
    top = 3 * g - 1
    half = top // 2
    values = [Fraction(1)]
    for k in range(half):
        values.append(values[-1] + _difference(g, k))
    full = [values[k] if k <= half else values[top - k] for k in range(top + 1)]
    return TwoCorrelatorRow(g, tuple(full))


def a_gk(g: int, k: int) -> Fraction:
    if not 0 <= k <= 3 * g - 1:
        raise DomainError(f"k must lie in 0..{3 * g - 1}, got {k}")
    return a_gk_row(g)[k]


def _two_point_normalization(g: int, k: int) -> Fraction:
    return Fraction(
        24 ** g * factorial(g) * double_factorial(2 * k + 1) * double_factorial(6 * g - 1 - 2 * k),
        double_factorial(6 * g - 1),
    )


def a_gk_from_correlator(g: int, k: int) -> Fraction:
    """The same normalization applied to the recursion's <tau_k tau_{3g-1-k}>_g."""
    return _two_point_normalization(g, k) * psi_correlator(g, [k, 3 * g - 1 - k])


def a_gk_row_from_two_point(g: int) -> TwoCorrelatorRow:
    """The normalization applied to the closed two-point function."""
    raw = two_point_row(g)
    return TwoCorrelatorRow(g, tuple(_two_point_normalization(g, k) * x for k, x in enumerate(raw)))


def verified_a_gk_row(g: int) -> TwoCorrelatorRow:
    row = a_gk_row(g)
    if row != a_gk_row_from_two_point(g):
        raise ConsistencyError(f"a_{{{g},k}} from the difference formula disagrees with the two-point function")
    log.debug("a_{%d,k} agrees with the two-point function", g)
    return row


def r_gj(g: int, j: int) -> Fraction:
    """R(g, j) = C(3g, 3j) C(g, j) / C(6g, 6j)."""
    if not 0 <= j <= g:
        raise DomainError(f"R(g, j) needs 0 <= j <= g, got ({g}, {j})")
    return Fraction(comb(3 * g, 3 * j) * comb(g, j), comb(6 * g, 6 * j))


# ---------------------------------------------------------------------------
# One-edge graphs
# ---------------------------------------------------------------------------

def gamma1_rational_factor(h: int) -> Fraction:
    """Vol Gamma_1(h + 1) / zeta(6h)."""
    row = a_gk_row(h)
    total = sum((comb(6 * h, 2 * k + 1) * row[k] for k in range(3 * h)), Fraction(0))
    return Fraction(factorial(4 * h), factorial(h) * factorial(3 * h) * 3 ** h * 2 ** (2 * h)) * 2 * total


def vol_gamma1(g: int) -> PiMonomial:
    """Contribution of the one-loop graph of genus g (a vertex of genus g - 1 with a loop)."""
    if g < 2:
        raise DomainError(f"vol_gamma1 needs g >= 2, got {g}")
    h = g - 1
    return zeta_even(6 * h) * gamma1_rational_factor(h)


def gamma1_bounds(h: int) -> tuple[Fraction, Fraction]:
    """Lower and upper bounds for Vol Gamma_1(h + 1) / zeta(6h)."""
    upper = comb(4 * h, h) * Fraction(16, 3) ** h
    return upper * (1 - Fraction(2, 6 * h - 1)), upper


def vol_delta(g1: int, g2: int) -> PiMonomial:
    """Contribution of two vertices of genus g1, g2 joined by one edge."""
    if g1 < 1 or g2 < 1:
        raise DomainError(f"vol_delta needs g1, g2 >= 1, got ({g1}, {g2})")
    g = g1 + g2
    aut = 2 if g1 == g2 else 1
    coeff = Fraction(4 * comb(4 * g - 4, g) * comb(g, g1) * comb(3 * g - 4, 3 * g1 - 2), aut * 12 ** g)
    return zeta_even(6 * g - 6) * coeff


def separating_volume(g: int) -> PiMonomial:
    """Sum of vol_delta over the unordered splittings g = g1 + g2."""
    return sum((vol_delta(g1, g - g1) for g1 in range(1, g // 2 + 1)), PiMonomial.zero())


def s_g(g: int) -> int:
    """S(g) = sum_{g1=1}^{g-1} C(g, g1) C(3g - 4, 3g1 - 2)."""
    if g < 2:
        raise DomainError(f"S(g) needs g >= 2, got {g}")
    return sum(comb(g, g1) * comb(3 * g - 4, 3 * g1 - 2) for g1 in range(1, g))


def s_g_recurrence(g: int) -> int:
    """S(g) from S(2) = 4, S(3) = 30 and the second-order recurrence."""
    if g < 2:
        raise DomainError(f"S(g) needs g >= 2, got {g}")
    prev, cur = Fraction(4), Fraction(30)
    if g == 2:
        return 4
    for m in range(2, g - 1):
        # produces S(m + 2)
        den = (6 * m - 1) * (3 * m + 4) * (3 * m - 1)
        p = Fraction(2 * (324 * m**4 + 432 * m**3 + 123 * m**2 - 49 * m - 8), den * (m + 1))
        q = Fraction(36 * (6 * m + 5) * (4 * m - 1) * (4 * m - 3), den)
        prev, cur = cur, p * cur + q * prev
    if cur.denominator != 1:
        raise DomainError(f"recurrence for S({g}) left a non-integer {cur}")
    return int(cur)


# ---------------------------------------------------------------------------
# Diagnostics (never asserted as limits)
# ---------------------------------------------------------------------------

def asymptotic_lower_bound(g: int) -> mpmath.mpf:
    """sqrt(2 / (3 pi g)) (8/3)^(4g-4) (1 - 2/(6g-7))."""
    with working_precision(DIAGNOSTIC_DIGITS):
        return (
            mpmath.sqrt(mpmath.mpf(2) / (3 * mpmath.pi * g))
            * (mpmath.mpf(8) / 3) ** (4 * g - 4)
            * (1 - mpmath.mpf(2) / (6 * g - 7))
        )


def conjecture_ratio(g: int, volume: PiMonomial | None = None) -> mpmath.mpf:
    """Vol Q_{g,0} * pi/4 * (3/8)^(4g-4); tends to 1 if the volumes grow as conjectured."""
    if volume is None:
        volume = masur_veech_volume(g, 0)
    with working_precision(DIAGNOSTIC_DIGITS):
        return volume.to_mpf() * mpmath.pi / 4 * (mpmath.mpf(3) / 8) ** (4 * g - 4)


def gamma1_ratio(g: int) -> mpmath.mpf:
    """Vol Gamma_1(g) / (sqrt(2/(3 pi (g-1))) (8/3)^(4g-4))."""
    with working_precision(DIAGNOSTIC_DIGITS):
        scale = mpmath.sqrt(mpmath.mpf(2) / (3 * mpmath.pi * (g - 1))) * (mpmath.mpf(8) / 3) ** (4 * g - 4)
        return vol_gamma1(g).to_mpf() / scale


def s_g_deviation(g: int) -> mpmath.mpf:
    """|S(g) sqrt(6 pi g) / 2^(4g-4) - 1|."""
    with working_precision(DIAGNOSTIC_DIGITS):
        return abs(s_g(g) * mpmath.sqrt(6 * mpmath.pi * g) / mpmath.mpf(2) ** (4 * g - 4) - 1)
