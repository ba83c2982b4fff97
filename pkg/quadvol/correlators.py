"""
psi-class intersection numbers <tau_{d_1} ... tau_{d_n}>_g.

Values come from the Dijkgraaf-Verlinde-Verlinde recursion, with the string
and dilaton equations applied first whenever an exponent is 0 or 1.  All
values are memoized in a process-wide table keyed by the sorted exponent
multiset; the table can be persisted to a versioned, checksummed text file.
"""
from __future__ import annotations

import hashlib
import logging
import os
import threading
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial, prod
from typing import Iterable, NamedTuple, Sequence

import sympy

from .errors import CacheCorruptError, ConsistencyError, DomainError
from .exact_arith import double_factorial

log = logging.getLogger(__name__)

CACHE_FORMAT_VERSION = 1
CACHE_HEADER = f"# quadvol correlator cache v{CACHE_FORMAT_VERSION}"
CACHE_FOOTER_PREFIX = "# sha256 "
CACHE_FILE_NAME = "correlators.txt"


class CorrelatorKey(NamedTuple):
    genus: int
    exponents: tuple[int, ...]

    @classmethod
    def of(cls, g: int, d: Iterable[int]) -> CorrelatorKey:
        return cls(g, tuple(sorted(d)))

    @property
    def n(self) -> int:
        return len(self.exponents)

    def is_stable(self) -> bool:
        return self.n >= 1 and 2 * self.genus - 2 + self.n > 0

    def in_dimension(self) -> bool:
        return sum(self.exponents) == 3 * self.genus - 3 + self.n

    def __str__(self) -> str:
        taus = " ".join(f"tau_{d}" for d in self.exponents)
        return f"<{taus}>_{self.genus}"


_BASE = {
    CorrelatorKey(0, (0, 0, 0)): Fraction(1),
    CorrelatorKey(1, (1,)): Fraction(1, 24),
}


def _remove_one(d: tuple[int, ...], value: int) -> tuple[int, ...]:
    i = d.index(value)
    return d[:i] + d[i + 1:]


def _sub_multisets(d: tuple[int, ...]):
    """Yield (I, J, multiplicity) over ordered splits of the multiset d."""
    counts = sorted(Counter(d).items())
    values = [v for v, _ in counts]
    for choice in product(*(range(m + 1) for _, m in counts)):
        weight = prod(comb(m, c) for (_, m), c in zip(counts, choice))
        left = tuple(v for v, c in zip(values, choice) for _ in range(c))
        right = tuple(v for (v, m), c in zip(counts, choice) for _ in range(m - c))
        yield left, right, weight


class CorrelatorTable:
    """Memo table of correlator values; safe for concurrent readers."""

    def __init__(self):
        self._values: dict[CorrelatorKey, Fraction] = dict(_BASE)
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._values)

    def snapshot(self) -> dict[CorrelatorKey, Fraction]:
        with self._lock:
            return dict(self._values)

    def merge(self, entries: dict[CorrelatorKey, Fraction]) -> None:
        with self._lock:
            for key, value in entries.items():
                self._values.setdefault(key, value)

    def clear(self) -> None:
        with self._lock:
            self._values = dict(_BASE)

    def value(self, g: int, d: Iterable[int]) -> Fraction:
        return self._lookup(CorrelatorKey.of(g, d))

    # -------------------------------------------------------------------------

    def _lookup(self, key: CorrelatorKey) -> Fraction:
        if not key.is_stable() or not key.in_dimension() or (key.exponents and key.exponents[0] < 0):
            return Fraction(0)
        cached = self._values.get(key)
        if cached is not None:
            return cached
        value = self._compute(key)
        with self._lock:
            self._values.setdefault(key, value)
        return value

    def _compute(self, key: CorrelatorKey) -> Fraction:
        g, d = key
        if 0 in d:
            rest = _remove_one(d, 0)
            return sum(
                (self._lookup(CorrelatorKey.of(g, rest[:i] + (rest[i] - 1,) + rest[i + 1:]))
                 for i in range(len(rest)) if rest[i] > 0),
                Fraction(0),
            )
        if 1 in d:
            rest = _remove_one(d, 1)
            return (2 * g - 2 + len(rest)) * self._lookup(CorrelatorKey(g, rest))
        return self._dvv(g, d)

    def _dvv(self, g: int, d: tuple[int, ...]) -> Fraction:
        k = d[-1] - 1
        rest = d[:-1]
        total = Fraction(0)

        for j, dj in enumerate(rest):
            coeff = Fraction(double_factorial(2 * k + 2 * dj + 1), double_factorial(2 * dj - 1))
            merged = rest[:j] + (dj + k,) + rest[j + 1:]
            total += coeff * self._lookup(CorrelatorKey.of(g, merged))

        half = Fraction(0)
        for r in range(k):
            s = k - 1 - r
            weight = double_factorial(2 * r + 1) * double_factorial(2 * s + 1)
            if g >= 1:
                half += weight * self._lookup(CorrelatorKey.of(g - 1, (r, s) + rest))
            for left, right, mult in _sub_multisets(rest):
                # the dimension constraint fixes g1
                num = r + sum(left) - len(left) + 2
                if num % 3:
                    continue
                g1 = num // 3
                if not 0 <= g1 <= g:
                    continue
                a = self._lookup(CorrelatorKey.of(g1, (r,) + left))
                if a == 0:
                    continue
                b = self._lookup(CorrelatorKey.of(g - g1, (s,) + right))
                half += weight * mult * a * b
        total += half / 2
        return total / double_factorial(2 * k + 3)


_TABLE = CorrelatorTable()


def default_table() -> CorrelatorTable:
    return _TABLE


def psi_correlator(g: int, d: Sequence[int]) -> Fraction:
    """<tau_{d_1} ... tau_{d_n}>_g; zero outside the dimension constraint."""
    d = tuple(d)
    if g < 0 or any(x < 0 for x in d):
        raise DomainError(f"correlator arguments must be nonnegative: g={g}, d={d}")
    if len(d) < 1 or 2 * g - 2 + len(d) <= 0:
        raise DomainError(f"unstable correlator: g={g}, n={len(d)}")
    return _TABLE.value(g, d)


def correlator_symbol(g: int, d: Sequence[int]):
    """An unevaluated correlator as a sympy symbol; 0 outside the dimension constraint."""
    key = CorrelatorKey.of(g, d)
    if not key.in_dimension():
        return sympy.Integer(0)
    return sympy.Symbol(str(key), positive=True)


def genus0_correlator(d: Sequence[int]) -> Fraction:
    """Closed form (n-3)!/prod d_i! for genus zero."""
    n = len(d)
    if n < 3:
        raise DomainError(f"unstable genus-0 correlator with n={n}")
    if sum(d) != n - 3:
        return Fraction(0)
    return Fraction(factorial(n - 3), prod(factorial(x) for x in d))


@lru_cache(maxsize=None)
def two_point_row(g: int) -> tuple[Fraction, ...]:
    """
    (<tau_k tau_{3g-1-k}>_g for k = 0..3g-1), read off the closed two-point function

        sum_g sum_k <tau_k tau_{3g-1-k}>_g w^k z^{3g-1-k}
            = exp((w^3 + z^3)/24) / (w + z) * sum_n n!/(2n+1)! (wz(w+z)/2)^n.

    Cross-checks the recursion in high genus.
    """
    if g < 1:
        raise DomainError(f"two-point correlators need g >= 1, got {g}")
    top = 3 * g
    # c[i] is the coefficient of w^i z^(3g-i) in the numerator
    c = [Fraction(0)] * (top + 1)
    for m in range(g + 1):
        n = g - m
        scale = Fraction(factorial(n), 24 ** m * factorial(m) * factorial(2 * n + 1) * 2 ** n)
        # (w^3 + z^3)^m * (wz)^n * (w + z)^n
        for a in range(m + 1):
            for b in range(n + 1):
                c[3 * a + n + b] += scale * comb(m, a) * comb(n, b)
    q = [Fraction(0)] * top
    prev = Fraction(0)
    for i in range(top):
        prev = q[i] = c[i] - prev
    if prev != c[top]:
        raise ConsistencyError(f"genus-{g} two-point numerator is not divisible by w + z")
    return tuple(q)


# ---------------------------------------------------------------------------
# Persistent cache
# ---------------------------------------------------------------------------

@dataclass
class CacheLoad:
    status: str                       # "loaded", "empty", "missing" or "rebuild"
    entries: dict[CorrelatorKey, Fraction] = field(default_factory=dict)
    reason: str = ""


def _encode_entry(key: CorrelatorKey, value: Fraction) -> str:
    exps = ",".join(str(x) for x in key.exponents)
    return f"{key.genus};{exps};{value.numerator}/{value.denominator}"


def _decode_entry(line: str) -> tuple[CorrelatorKey, Fraction]:
    try:
        g, exps, value = line.split(";")
        num, den = value.split("/")
        key = CorrelatorKey.of(int(g), (int(x) for x in exps.split(",")) if exps else ())
        return key, Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError) as exc:
        raise CacheCorruptError(f"malformed cache line {line!r}") from exc


def _checksum(body: list[str]) -> str:
    return hashlib.sha256("\n".join(body).encode("ascii")).hexdigest()


def store_cache(path: str | os.PathLike, entries: dict[CorrelatorKey, Fraction] | None = None) -> int:
    """Write ``entries`` (default: the whole table) to ``path``; returns the entry count."""
    if entries is None:
        entries = _TABLE.snapshot()
    body = [_encode_entry(k, v) for k, v in sorted(entries.items())]
    lines = [CACHE_HEADER, *body, CACHE_FOOTER_PREFIX + _checksum(body)]
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
    log.info("stored %d correlators in %s", len(body), path)
    return len(body)


def _parse_cache(raw: bytes) -> dict[CorrelatorKey, Fraction]:
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError as exc:
        raise CacheCorruptError(f"non-ASCII byte at offset {exc.start}") from exc
    lines = text.splitlines()
    if not lines or lines[0] != CACHE_HEADER:
        raise CacheCorruptError("missing or unsupported cache header")
    if len(lines) < 2 or not lines[-1].startswith(CACHE_FOOTER_PREFIX):
        raise CacheCorruptError("missing checksum footer")
    body = lines[1:-1]
    if lines[-1][len(CACHE_FOOTER_PREFIX):] != _checksum(body):
        raise CacheCorruptError("checksum mismatch")
    return dict(_decode_entry(line) for line in body)


def load_cache(path: str | os.PathLike) -> CacheLoad:
    """Read a cache file.  Corruption is logged and reported as a rebuild."""
    if not os.path.exists(path):
        return CacheLoad("missing")
    with open(path, "rb") as fh:
        raw = fh.read()
    if not raw.strip():
        return CacheLoad("empty")
    try:
        entries = _parse_cache(raw)
    except CacheCorruptError as exc:
        log.warning("correlator cache %s is corrupt (%s); it will be rebuilt", path, exc)
        return CacheLoad("rebuild", reason=str(exc))
    log.info("loaded %d correlators from %s", len(entries), path)
    return CacheLoad("loaded", entries)


def warm_from_cache(path: str | os.PathLike) -> CacheLoad:
    """Load ``path`` into the process-wide table."""
    result = load_cache(path)
    if result.entries:
        _TABLE.merge(result.entries)
    return result
