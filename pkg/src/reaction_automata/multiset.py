"""Finite multisets over symbol alphabets.

A :class:`Multiset` is an immutable sparse map from symbol names to positive
counts.  Zero counts are never stored, so structural equality and hashing
coincide with multiset equality.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping

from .errors import MultisetError

_FORBIDDEN = frozenset("|^#")


def check_symbol(name: str) -> str:
    """Return ``name`` if it is a legal symbol token, else raise."""
    if not isinstance(name, str) or not name:
        raise MultisetError(f"symbol must be a non-empty string, got {name!r}")
    if not name.isprintable() or any(ch.isspace() for ch in name):
        raise MultisetError(f"symbol {name!r} contains whitespace or unprintable characters")
    if _FORBIDDEN.intersection(name):
        raise MultisetError(f"symbol {name!r} contains one of '|', '^', '#'")
    return name


class Multiset(Mapping[str, int]):
    """Immutable multiset; ``m[s]`` is 0 for absent symbols."""

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts: Mapping[str, int] | Iterable[str] | None = None):
        data: dict[str, int] = {}
        if counts is None:
            pass
        elif isinstance(counts, Mapping):
            for sym, k in counts.items():
                if not isinstance(k, int) or k < 0:
                    raise MultisetError(f"count for {sym!r} must be a non-negative int, got {k!r}")
                if k:
                    data[check_symbol(sym)] = k
        else:
            if isinstance(counts, str):
                raise MultisetError("pass an iterable of symbols, or use parse_multiset for literals")
            for sym in counts:
                check_symbol(sym)
                data[sym] = data.get(sym, 0) + 1
        self._counts = data
        self._hash: int | None = None

    @classmethod
    def _trusted(cls, data: dict[str, int]) -> Multiset:
        obj = cls.__new__(cls)
        obj._counts = data
        obj._hash = None
        return obj

    # Mapping protocol
    def __getitem__(self, sym: str) -> int:
        return self._counts.get(sym, 0)

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, sym: object) -> bool:
        return sym in self._counts

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Multiset):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._counts)

    def __repr__(self) -> str:
        return f"Multiset({format_multiset(self)!r})"

    def __str__(self) -> str:
        return format_multiset(self)

    def __add__(self, other: Multiset) -> Multiset:
        return msum(self, other)

    def __sub__(self, other: Multiset) -> Multiset:
        return difference(self, other)

    def __le__(self, other: Multiset) -> bool:
        return contains(self, other)

    @property
    def weight(self) -> int:
        return sum(self._counts.values())

    def support(self) -> frozenset[str]:
        return frozenset(self._counts)


EMPTY = Multiset()


def contains(m1: Multiset, m2: Multiset) -> bool:
    """True iff ``m1`` is a multisubset of ``m2``."""
    c2 = m2._counts
    return all(c2.get(s, 0) >= k for s, k in m1._counts.items())


def msum(m1: Multiset, m2: Multiset) -> Multiset:
    data = dict(m1._counts)
    for s, k in m2._counts.items():
        data[s] = data.get(s, 0) + k
    return Multiset._trusted(data)


def difference(m1: Multiset, m2: Multiset) -> Multiset:
    """``m1 - m2``; defined only when ``m2`` is a multisubset of ``m1``."""
    if not contains(m2, m1):
        raise MultisetError(f"not a multisubset: {format_multiset(m2)} of {format_multiset(m1)}")
    data = dict(m1._counts)
    for s, k in m2._counts.items():
        left = data[s] - k
        if left:
            data[s] = left
        else:
            del data[s]
    return Multiset._trusted(data)


def intersect(m1: Multiset, m2: Multiset) -> Multiset:
    c2 = m2._counts
    data = {s: min(k, c2[s]) for s, k in m1._counts.items() if s in c2}
    return Multiset._trusted(data)


def scale(m: Multiset, n: int) -> Multiset:
    if not isinstance(n, int) or n < 0:
        raise MultisetError(f"scale factor must be a non-negative int, got {n!r}")
    if n == 0:
        return EMPTY
    return Multiset._trusted({s: k * n for s, k in m._counts.items()})


def disjoint_with_set(m: Multiset, symbols: Iterable[str]) -> bool:
    return not any(s in m._counts for s in symbols)


def stm(word: Iterable[str]) -> Multiset:
    """Encode a string as a multiset; position i of n contributes 2**(n-i) copies."""
    syms = list(word)
    n = len(syms)
    data: dict[str, int] = {}
    for i, s in enumerate(syms):
        check_symbol(s)
        data[s] = data.get(s, 0) + (1 << (n - 1 - i))
    return Multiset._trusted(data)


def format_multiset(m: Multiset) -> str:
    """Canonical literal: symbols sorted by name, ``^k`` for k > 1, ``-`` if empty."""
    if not m:
        return "-"
    parts = []
    for s in sorted(m._counts):
        k = m._counts[s]
        parts.append(s if k == 1 else f"{s}^{k}")
    return " ".join(parts)


def parse_multiset(text: str) -> Multiset:
    """Parse a literal of whitespace-separated ``sym`` / ``sym^k`` tokens (``-`` is empty)."""
    tokens = text.split()
    if tokens == ["-"]:
        return EMPTY
    if not tokens:
        raise MultisetError("empty multiset literal; write '-' for the empty multiset")
    data: dict[str, int] = {}
    for tok in tokens:
        if "^" in tok:
            sym, _, exp = tok.partition("^")
            if not exp.isdigit() or int(exp) < 1:
                raise MultisetError(f"bad multiplicity in {tok!r}")
            k = int(exp)
        else:
            sym, k = tok, 1
        if sym == "-":
            raise MultisetError("'-' cannot be combined with other tokens")
        check_symbol(sym)
        data[sym] = data.get(sym, 0) + k
    return Multiset._trusted(data)


def ms(text: str = "-") -> Multiset:
    """Shorthand for :func:`parse_multiset`."""
    return parse_multiset(text)
