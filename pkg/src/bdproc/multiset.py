"""Finite multisets with natural-number multiplicities.

A :class:`Multiset` is an immutable mapping from elements to positive
multiplicities.  Absent elements have multiplicity zero and zero is never
stored, so two multisets compare equal exactly when they agree pointwise.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Iterator, Mapping
from typing import Any

MAX_MULTIPLICITY = 2**64 - 1


class MultiplicityOverflow(OverflowError):
    """Raised when a multiplicity leaves the unsigned 64-bit range."""


def _checked(value: int) -> int:
    if value > MAX_MULTIPLICITY:
        raise MultiplicityOverflow(f"multiplicity {value} exceeds 2**64-1")
    return value


class Multiset(Mapping):
    """Immutable multiset.

    Construct from a mapping of counts or from an iterable of elements
    (each occurrence counts once)::

        >>> Multiset(["x", "x", "y"]) + Multiset({"y": 1})
        Multiset({'x': 2, 'y': 2})
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, items: Mapping[Any, int] | Iterable[Hashable] | None = None):
        counts: dict[Any, int] = {}
        if items is None:
            pass
        elif isinstance(items, Mapping):
            for x, k in items.items():
                if not isinstance(k, int) or isinstance(k, bool) or k < 0:
                    raise ValueError(f"multiplicity of {x!r} must be a natural number, got {k!r}")
                if k:
                    counts[x] = _checked(k)
        else:
            for x in items:
                counts[x] = _checked(counts.get(x, 0) + 1)
        self._counts = counts
        self._hash: int | None = None

    @classmethod
    def _raw(cls, counts: dict) -> "Multiset":
        ms = cls.__new__(cls)
        ms._counts = counts
        ms._hash = None
        return ms

    # Mapping protocol: missing elements have multiplicity 0.
    def __getitem__(self, x: Any) -> int:
        return self._counts.get(x, 0)

    def __iter__(self) -> Iterator:
        return iter(self._counts)

    def __len__(self) -> int:
        """Number of distinct elements (the support size)."""
        return len(self._counts)

    def __contains__(self, x: object) -> bool:
        return x in self._counts

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Multiset):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self._counts == {x: k for x, k in other.items() if k}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{x!r}: {k}" for x, k in self.sorted_items())
        return f"Multiset({{{inner}}})"

    def __str__(self) -> str:
        return "{" + ",".join(",".join([str(x)] * k) for x, k in self.sorted_items()) + "}"

    def sorted_items(self) -> list[tuple[Any, int]]:
        return sorted(self._counts.items(), key=lambda kv: str(kv[0]))

    def elements(self) -> list:
        """Elements repeated by multiplicity, in sorted order."""
        return [x for x, k in self.sorted_items() for _ in range(k)]

    def support(self) -> frozenset:
        return frozenset(self._counts)

    def cardinality(self) -> int:
        return sum(self._counts.values())

    def is_empty(self) -> bool:
        return not self._counts

    def __bool__(self) -> bool:
        return bool(self._counts)

    # -- algebra ---------------------------------------------------------

    def __add__(self, other: Mapping) -> "Multiset":
        counts = dict(self._counts)
        for x, k in other.items():
            if k:
                counts[x] = _checked(counts.get(x, 0) + k)
        return Multiset._raw(counts)

    def __sub__(self, other: Mapping) -> "Multiset":
        """Truncated difference: ``max(A(x) - B(x), 0)``."""
        counts = {}
        for x, k in self._counts.items():
            r = k - other.get(x, 0)
            if r > 0:
                counts[x] = r
        return Multiset._raw(counts)

    def __or__(self, other: Mapping) -> "Multiset":
        counts = dict(self._counts)
        for x, k in other.items():
            if k > counts.get(x, 0):
                counts[x] = k
        return Multiset._raw(counts)

    def __and__(self, other: Mapping) -> "Multiset":
        counts = {}
        for x, k in self._counts.items():
            m = min(k, other.get(x, 0))
            if m:
                counts[x] = m
        return Multiset._raw(counts)

    def __mul__(self, k: int) -> "Multiset":
        if not isinstance(k, int) or k < 0:
            raise ValueError("scalar must be a natural number")
        if k == 0:
            return Multiset()
        return Multiset._raw({x: _checked(v * k) for x, v in self._counts.items()})

    __rmul__ = __mul__

    def __le__(self, other: Mapping) -> bool:
        return all(k <= other.get(x, 0) for x, k in self._counts.items())

    def __ge__(self, other: Mapping) -> bool:
        return Multiset(other) <= self

    def __lt__(self, other: Mapping) -> bool:
        return self <= other and self != other

    def __gt__(self, other: Mapping) -> bool:
        return self >= other and self != other

    def restrict(self, keep: Iterable) -> "Multiset":
        """Restriction to the elements of ``keep``."""
        keep = set(keep)
        return Multiset._raw({x: k for x, k in self._counts.items() if x in keep})

    def map(self, fn) -> "Multiset":
        """Image under ``fn``, summing multiplicities of merged elements."""
        counts: dict = {}
        for x, k in self._counts.items():
            y = fn(x)
            counts[y] = _checked(counts.get(y, 0) + k)
        return Multiset._raw(counts)

    def sort_key(self, universe: Iterable) -> tuple[int, ...]:
        """Multiplicity vector over ``universe`` taken in sorted order."""
        return tuple(self._counts.get(x, 0) for x in sorted(universe))


EMPTY = Multiset()
