"""
Exact scalar tower used by every other module.

Rationals are plain ``fractions.Fraction`` values.  On top of them sit
``PiMonomial`` (rational times an integer power of pi, the natural home of
volumes and even zeta values) and ``ZetaExpr`` (formal rational combinations
of products of zeta values, the image of the cylinder operator before even
arguments are evaluated).

Decimal renderings are always produced from the exact value and rounded
half-even to the requested number of significant digits.
"""
from __future__ import annotations

import logging
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Iterator, Mapping, Union

import mpmath

from .errors import DivergenceError, DomainError, NonMonomialDivisorError

__all__ = [
    "ExactRational",
    "DIVERGENT",
    "PiMonomial",
    "ZetaExpr",
    "ZetaQuotient",
    "bernoulli",
    "double_factorial",
    "zeta_even",
    "zeta_numeric",
    "evaluate_zeta_expr",
    "rational_to_decimal",
    "rational_to_json",
    "working_precision",
]

log = logging.getLogger(__name__)

ExactRational = Fraction
Scalar = Union[int, Fraction]

DIVERGENT = "DIVERGENT"

# Extra working precision for mpmath before the final half-even rounding.
GUARD_DIGITS = 15


# ---------------------------------------------------------------------------
# Factorial families and Bernoulli numbers
# ---------------------------------------------------------------------------

def double_factorial(n: int) -> int:
    """n!! with the usual conventions (-1)!! = 0!! = 1."""
    if n < -1:
        raise DomainError(f"double factorial undefined for {n}")
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


_bernoulli_memo: list[Fraction] = [Fraction(1)]
_bernoulli_lock = threading.Lock()


def _bernoulli_upto(m: int) -> None:
    with _bernoulli_lock:
        memo = _bernoulli_memo
        while len(memo) <= m:
            k = len(memo)
            # sum_{j=0}^{k} C(k+1, j) B_j = 0
            s = sum(comb(k + 1, j) * memo[j] for j in range(k))
            memo.append(Fraction(-s, k + 1))


def bernoulli(m: int) -> Fraction:
    """Bernoulli number B_m for even m >= 0."""
    if m < 0 or m % 2:
        raise DomainError(f"bernoulli: index must be even and nonnegative, got {m}")
    if m >= len(_bernoulli_memo):
        _bernoulli_upto(m)
    return _bernoulli_memo[m]


# ---------------------------------------------------------------------------
# Decimal rendering
# ---------------------------------------------------------------------------

def _format_decimal(value: Decimal) -> str:
    if value.is_zero():
        return "0"
    if -12 < value.adjusted() < 30:
        return format(value, "f")
    return format(value, "e")


def rational_to_decimal(x: Scalar, digits: int) -> str:
    """Correctly rounded (half-even) decimal with ``digits`` significant digits."""
    if digits < 1:
        raise DomainError(f"digits must be positive, got {digits}")
    x = Fraction(x)
    ctx = Context(prec=digits, rounding=ROUND_HALF_EVEN)
    return _format_decimal(ctx.divide(Decimal(x.numerator), Decimal(x.denominator)))


def _mpf_to_decimal(x: mpmath.mpf, digits: int) -> str:
    raw = Decimal(mpmath.nstr(x, digits + GUARD_DIGITS, strip_zeros=False, min_fixed=1, max_fixed=0))
    ctx = Context(prec=digits, rounding=ROUND_HALF_EVEN)
    return _format_decimal(ctx.plus(raw))


def rational_to_json(x: Scalar) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


# ---------------------------------------------------------------------------
# PiMonomial
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiMonomial:
    """coeff * pi**pi_exp with an exact rational coefficient."""

    coeff: Fraction
    pi_exp: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.coeff == 0:
            object.__setattr__(self, "pi_exp", 0)

    @classmethod
    def zero(cls) -> PiMonomial:
        return cls(Fraction(0), 0)

    def is_zero(self) -> bool:
        return self.coeff == 0

    def __mul__(self, other):
        if isinstance(other, PiMonomial):
            return PiMonomial(self.coeff * other.coeff, self.pi_exp + other.pi_exp)
        if isinstance(other, (int, Fraction)):
            return PiMonomial(self.coeff * other, self.pi_exp)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PiMonomial):
            if other.is_zero():
                raise ZeroDivisionError("division by zero PiMonomial")
            return PiMonomial(self.coeff / other.coeff, self.pi_exp - other.pi_exp)
        if isinstance(other, (int, Fraction)):
            return PiMonomial(self.coeff / other, self.pi_exp)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return PiMonomial(other) / self
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, PiMonomial):
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.pi_exp != other.pi_exp:
            raise DomainError(f"cannot add pi^{self.pi_exp} and pi^{other.pi_exp} exactly")
        return PiMonomial(self.coeff + other.coeff, self.pi_exp)

    __radd__ = __add__

    def __neg__(self) -> PiMonomial:
        return PiMonomial(-self.coeff, self.pi_exp)

    def __sub__(self, other):
        if not isinstance(other, PiMonomial):
            return NotImplemented
        return self + (-other)

    def __pow__(self, k: int) -> PiMonomial:
        return PiMonomial(self.coeff ** k, self.pi_exp * k)

    def rational(self) -> Fraction:
        """The coefficient, provided the pi powers have cancelled."""
        if self.pi_exp != 0:
            raise DomainError(f"value {self} is not rational")
        return self.coeff

    def to_mpf(self) -> mpmath.mpf:
        return mpmath.mpf(self.coeff.numerator) / self.coeff.denominator * mpmath.pi ** self.pi_exp

    def to_decimal(self, digits: int) -> str:
        if self.pi_exp == 0:
            return rational_to_decimal(self.coeff, digits)
        with _mp_lock, mpmath.workdps(digits + GUARD_DIGITS):
            return _mpf_to_decimal(self.to_mpf(), digits)

    def to_json(self) -> dict:
        return {**rational_to_json(self.coeff), "pi_exp": self.pi_exp}

    def __str__(self) -> str:
        if self.pi_exp == 0:
            return str(self.coeff)
        return f"{self.coeff}*pi^{self.pi_exp}"


def zeta_even(s: int) -> PiMonomial:
    """zeta(s) = (-1)^(m+1) B_s (2 pi)^s / (2 s!) for s = 2m."""
    if s < 2 or s % 2:
        raise DomainError(f"zeta_even: argument must be even and >= 2, got {s}")
    m = s // 2
    sign = 1 if m % 2 else -1
    return PiMonomial(sign * bernoulli(s) * 2 ** s / (2 * factorial(s)), s)


# mpmath keeps its working precision in global state.
_mp_lock = threading.RLock()


@contextmanager
def working_precision(digits: int):
    """mpmath precision block, serialized across threads."""
    with _mp_lock, mpmath.workdps(digits + GUARD_DIGITS):
        yield


def _zeta_mpf(s: int) -> mpmath.mpf:
    if s == 1:
        raise DivergenceError("zeta(1) diverges")
    if s < 1:
        raise DomainError(f"zeta argument must be >= 2, got {s}")
    if s % 2 == 0:
        return zeta_even(s).to_mpf()
    return mpmath.zeta(s)


def zeta_numeric(s: int, digits: int) -> str:
    """zeta(s) rounded half-even to ``digits`` significant digits."""
    if digits < 1:
        raise DomainError(f"digits must be positive, got {digits}")
    with _mp_lock, mpmath.workdps(digits + GUARD_DIGITS):
        if s == 1:
            raise DivergenceError("zeta(1) diverges")
        if s < 1:
            raise DomainError(f"zeta argument must be >= 2, got {s}")
        return _mpf_to_decimal(mpmath.zeta(s), digits)


# ---------------------------------------------------------------------------
# ZetaExpr
# ---------------------------------------------------------------------------

ZetaKey = tuple[int, ...]


class ZetaExpr:
    """
    Finite sum  sum_k c_k * prod_i zeta(a_{k,i}).

    Keys are sorted tuples of zeta arguments (the empty tuple is the constant
    term).  Zero coefficients are never stored.  A key containing 1 marks a
    divergent term.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Iterable[int], Scalar] | None = None):
        clean: dict[ZetaKey, Fraction] = {}
        for args, c in (terms or {}).items():
            key = tuple(sorted(args))
            if any(a < 1 for a in key):
                raise DomainError(f"zeta arguments must be >= 1, got {key}")
            clean[key] = clean.get(key, Fraction(0)) + Fraction(c)
        self._terms = {k: v for k, v in clean.items() if v != 0}

    @classmethod
    def constant(cls, c: Scalar) -> ZetaExpr:
        return cls({(): c})

    @classmethod
    def zeta(cls, *args: int, coeff: Scalar = 1) -> ZetaExpr:
        return cls({tuple(args): coeff})

    @property
    def terms(self) -> dict[ZetaKey, Fraction]:
        return dict(self._terms)

    def __iter__(self) -> Iterator[tuple[ZetaKey, Fraction]]:
        return iter(sorted(self._terms.items()))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_divergent(self) -> bool:
        return any(1 in key for key in self._terms)

    def is_even(self) -> bool:
        return all(a % 2 == 0 for key in self._terms for a in key)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ZetaExpr.constant(other)
        if not isinstance(other, ZetaExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ZetaExpr.constant(other)
        if not isinstance(other, ZetaExpr):
            return NotImplemented
        merged = dict(self._terms)
        for k, v in other._terms.items():
            merged[k] = merged.get(k, Fraction(0)) + v
        return ZetaExpr(merged)

    __radd__ = __add__

    def __neg__(self) -> ZetaExpr:
        return ZetaExpr({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ZetaExpr.constant(other)
        if not isinstance(other, ZetaExpr):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ZetaExpr({k: v * other for k, v in self._terms.items()})
        if not isinstance(other, ZetaExpr):
            return NotImplemented
        product: dict[ZetaKey, Fraction] = {}
        for k1, v1 in self._terms.items():
            for k2, v2 in other._terms.items():
                key = tuple(sorted(k1 + k2))
                product[key] = product.get(key, Fraction(0)) + v1 * v2
        return ZetaExpr(product)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of ZetaExpr by zero")
            return ZetaExpr({k: v / other for k, v in self._terms.items()})
        if isinstance(other, ZetaExpr):
            return ZetaQuotient(self, other)
        return NotImplemented

    def to_pi(self) -> PiMonomial:
        """Exact value when every argument is even and all terms share one pi power."""
        total = PiMonomial.zero()
        for key, c in self._terms.items():
            if any(a % 2 for a in key):
                raise DomainError(f"zeta({key}) has an odd argument; no exact pi form")
            term = PiMonomial(c)
            for a in key:
                term = term * zeta_even(a)
            total = total + term
        return total

    def to_mpf(self) -> mpmath.mpf:
        if self.is_divergent():
            raise DivergenceError(f"{self} contains zeta(1)")
        total = mpmath.mpf(0)
        for key, c in self._terms.items():
            term = mpmath.mpf(c.numerator) / c.denominator
            for a in key:
                term *= _zeta_mpf(a)
            total += term
        return total

    def to_json(self) -> list[dict]:
        return [{"args": list(k), **rational_to_json(v)} for k, v in self]

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for key, c in self:
            factors = "*".join(f"zeta({a})" for a in key)
            parts.append(f"{c}*{factors}" if factors else str(c))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"ZetaExpr({self._terms!r})"


@dataclass(frozen=True, eq=False)
class ZetaQuotient:
    """
    numerator / denominator with a denominator that can be inverted exactly:
    either a single zeta product or an all-even expression with a single
    pi power.
    """

    numerator: ZetaExpr
    denominator: ZetaExpr

    def __post_init__(self):
        den = self.denominator
        if den.is_zero():
            raise ZeroDivisionError("ZetaQuotient with zero denominator")
        if den.is_divergent():
            raise DivergenceError(f"denominator {den} diverges")
        if not den.is_monomial():
            if not den.is_even():
                raise NonMonomialDivisorError(f"cannot divide by {den}")
            den.to_pi()

    def is_divergent(self) -> bool:
        return self.numerator.is_divergent()

    def exact(self) -> PiMonomial | None:
        """Exact pi-monomial value when both sides are all-even, else None."""
        if self.is_divergent() or not (self.numerator.is_even() and self.denominator.is_even()):
            return None
        try:
            return self.numerator.to_pi() / self.denominator.to_pi()
        except DomainError:
            return None

    def __eq__(self, other) -> bool:
        if isinstance(other, ZetaQuotient):
            return self.numerator * other.denominator == other.numerator * self.denominator
        if isinstance(other, (int, Fraction, ZetaExpr)):
            return self.numerator == self.denominator * other
        return NotImplemented

    def to_mpf(self) -> mpmath.mpf:
        return self.numerator.to_mpf() / self.denominator.to_mpf()

    def evaluate(self, digits: int) -> str:
        return evaluate_zeta_expr(self, digits)

    def to_json(self) -> dict:
        return {"numerator": self.numerator.to_json(), "denominator": self.denominator.to_json()}

    def __str__(self) -> str:
        return f"({self.numerator}) / ({self.denominator})"


def evaluate_zeta_expr(e: ZetaExpr | ZetaQuotient, digits: int) -> str:
    """
    Decimal value of ``e`` to ``digits`` significant digits, or DIVERGENT.

    Even arguments are taken from zeta_even (exact), odd ones from mpmath.
    """
    if digits < 1:
        raise DomainError(f"digits must be positive, got {digits}")
    if e.is_divergent():
        return DIVERGENT
    with _mp_lock, mpmath.workdps(digits + GUARD_DIGITS):
        return _mpf_to_decimal(e.to_mpf(), digits)
