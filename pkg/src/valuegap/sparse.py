"""Finitely supported real sequences indexed by the positive integers."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Tuple


class SparseSeq:
    """An element of c00 with exact rational entries and the l2 norm.

    Zero entries are never stored, so two sequences are equal exactly when
    their stored maps are equal.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, object] | Iterable[Tuple[int, object]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        clean: dict[int, Fraction] = {}
        for k, v in items:
            if isinstance(k, bool) or not isinstance(k, int) or k < 1:
                raise ValueError(f"index must be a positive integer, got {k!r}")
            if k in clean:
                raise ValueError(f"duplicate index {k}")
            v = Fraction(v)
            if v != 0:
                clean[k] = v
        self._entries = dict(sorted(clean.items()))

    @classmethod
    def basis(cls, n: int, coef=1) -> "SparseSeq":
        return cls({n: coef})

    @property
    def entries(self) -> dict[int, Fraction]:
        return dict(self._entries)

    @property
    def support(self) -> list[int]:
        return list(self._entries)

    def __getitem__(self, k: int) -> Fraction:
        return self._entries.get(k, Fraction(0))

    def __iter__(self) -> Iterator[Tuple[int, Fraction]]:
        return iter(self._entries.items())

    def __len__(self) -> int:
        return len(self._entries)

    def __add__(self, other: "SparseSeq") -> "SparseSeq":
        if not isinstance(other, SparseSeq):
            return NotImplemented
        out = dict(self._entries)
        for k, v in other._entries.items():
            out[k] = out.get(k, 0) + v
        return SparseSeq(out)

    def __neg__(self) -> "SparseSeq":
        return SparseSeq({k: -v for k, v in self._entries.items()})

    def __sub__(self, other: "SparseSeq") -> "SparseSeq":
        if not isinstance(other, SparseSeq):
            return NotImplemented
        return self + (-other)

    def __mul__(self, t) -> "SparseSeq":
        t = Fraction(t)
        return SparseSeq({k: t * v for k, v in self._entries.items()})

    __rmul__ = __mul__

    def dot(self, other: "SparseSeq") -> Fraction:
        small, big = sorted((self._entries, other._entries), key=len)
        return sum((v * big[k] for k, v in small.items() if k in big), Fraction(0))

    def norm_sq(self) -> Fraction:
        return sum((v * v for v in self._entries.values()), Fraction(0))

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseSeq):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(tuple(self._entries.items()))

    def __repr__(self) -> str:
        if not self._entries:
            return "SparseSeq({})"
        body = ", ".join(f"{k}: {v}" for k, v in self._entries.items())
        return f"SparseSeq({{{body}}})"
