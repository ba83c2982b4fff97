"""
Sparse multivariate polynomials in the cylinder variables b_1 ... b_k.

A CylPolynomial maps exponent vectors to coefficients.  Coefficients are
normally Fractions; the symbolic volume mode stores sympy expressions in the
same container, so nothing here assumes more than ring operations and a
comparison with 0.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Optional, Sequence

Exponents = tuple[int, ...]


class CylPolynomial:
    __slots__ = ("_nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[Exponents, object] | None = None):
        if nvars < 0:
            raise ValueError(f"nvars must be nonnegative, got {nvars}")
        self._nvars = nvars
        self._terms: dict[Exponents, object] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent vector {exps} does not have {nvars} entries")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if coeff != 0:
                self._terms[exps] = coeff

    # Constructors -------------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> CylPolynomial:
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value=1) -> CylPolynomial:
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, index: int, nvars: int) -> CylPolynomial:
        return cls.monomial([1 if i == index else 0 for i in range(nvars)])

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff=Fraction(1)) -> CylPolynomial:
        exps = tuple(exponents)
        return cls(len(exps), {exps: coeff})

    # Inspection ---------------------------------------------------------------

    @property
    def nvars(self) -> int:
        return self._nvars

    @property
    def terms(self) -> dict[Exponents, object]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponents, object]]:
        """Terms in lexicographically decreasing exponent order."""
        for exps in sorted(self._terms, reverse=True):
            yield exps, self._terms[exps]

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, exponents: Sequence[int]):
        return self._terms.get(tuple(exponents), 0)

    def degrees(self) -> set[int]:
        return {sum(e) for e in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def total_degree(self) -> int:
        if not self._terms:
            raise ValueError("the zero polynomial has no degree")
        return max(self.degrees())

    def all_exponents(self, predicate: Callable[[int], bool]) -> bool:
        return all(predicate(e) for exps in self._terms for e in exps)

    # Ring operations ----------------------------------------------------------

    def _check(self, other: CylPolynomial) -> None:
        if other._nvars != self._nvars:
            raise ValueError(f"variable count mismatch: {self._nvars} vs {other._nvars}")

    def __add__(self, other):
        if not isinstance(other, CylPolynomial):
            return self + CylPolynomial.constant(self._nvars, other)
        self._check(other)
        out = dict(self._terms)
        for exps, c in other._terms.items():
            out[exps] = out.get(exps, 0) + c
        return CylPolynomial(self._nvars, out)

    __radd__ = __add__

    def __neg__(self) -> CylPolynomial:
        return CylPolynomial(self._nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CylPolynomial):
            return CylPolynomial(self._nvars, {e: c * other for e, c in self._terms.items()})
        self._check(other)
        out: dict[Exponents, object] = defaultdict(int)
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
        return CylPolynomial(self._nvars, out)

    def __rmul__(self, other):
        return CylPolynomial(self._nvars, {e: other * c for e, c in self._terms.items()})

    def __pow__(self, k: int) -> CylPolynomial:
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = CylPolynomial.constant(self._nvars, Fraction(1))
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, CylPolynomial):
            return self._nvars == other._nvars and self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self._nvars, frozenset(self._terms.items())))

    # Calculus and substitution ------------------------------------------------

    def derivative(self, index: int) -> CylPolynomial:
        out = {}
        for exps, c in self._terms.items():
            m = exps[index]
            if m:
                out[exps[:index] + (m - 1,) + exps[index + 1:]] = m * c
        return CylPolynomial(self._nvars, out)

    def substitute_zero(self, index: int) -> CylPolynomial:
        return CylPolynomial(self._nvars, {e: c for e, c in self._terms.items() if e[index] == 0})

    def linear_part_in(self, index: int) -> CylPolynomial:
        """b_i * dP/db_i at b_i = 0: the terms where b_i appears exactly once."""
        return CylPolynomial(self._nvars, {e: c for e, c in self._terms.items() if e[index] == 1})

    def embed(self, targets: Sequence[Optional[int]], nvars: int) -> CylPolynomial:
        """
        Rename variables: variable i becomes variable ``targets[i]`` of a ring
        with ``nvars`` variables.  A target of None substitutes 0; several
        variables may share a target.
        """
        if len(targets) != self._nvars:
            raise ValueError(f"expected {self._nvars} targets, got {len(targets)}")
        out: dict[Exponents, object] = defaultdict(int)
        for exps, c in self._terms.items():
            new = [0] * nvars
            for m, t in zip(exps, targets):
                if m == 0:
                    continue
                if t is None:
                    break
                new[t] += m
            else:
                out[tuple(new)] += c
        return CylPolynomial(nvars, out)

    def times_monomial(self, exponents: Sequence[int]) -> CylPolynomial:
        shift = tuple(exponents)
        if len(shift) != self._nvars:
            raise ValueError(f"exponent vector {shift} does not have {self._nvars} entries")
        return CylPolynomial(
            self._nvars, {tuple(a + b for a, b in zip(e, shift)): c for e, c in self._terms.items()}
        )

    def evaluate(self, point: Sequence) -> object:
        total = 0
        for exps, c in self._terms.items():
            term = c
            for x, m in zip(point, exps):
                if m:
                    term = term * x ** m
            total = total + term
        return total

    def to_sympy(self, symbols: Sequence):
        return self.evaluate(symbols)

    # Rendering ----------------------------------------------------------------

    def to_json(self) -> list[dict]:
        rows = []
        for exps, c in self.items():
            c = Fraction(c)
            rows.append({"exp": list(exps), "num": str(c.numerator), "den": str(c.denominator)})
        return rows

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.items():
            mono = "*".join(
                f"b{i + 1}" if m == 1 else f"b{i + 1}^{m}" for i, m in enumerate(exps) if m
            )
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"CylPolynomial({self._nvars}, {self._terms!r})"
