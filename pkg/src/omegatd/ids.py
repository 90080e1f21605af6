"""Structured vertex identifiers.

A vertex knows where it came from: the finite base, a level of a periodic
tail, or one copy of an omega-fan.  The total order (base < tail < fan,
then lexicographic within each kind) is what makes every algorithm in the
package deterministic, so do not change it casually.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Union


@total_ordering
@dataclass(frozen=True)
class Base:
    name: str

    def _key(self):
        return (0, self.name)

    def __lt__(self, other: "VertexId") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        return self.name


@total_ordering
@dataclass(frozen=True)
class TailCopy:
    tail: str
    level: int
    local: str

    def _key(self):
        return (1, self.tail, self.level, self.local)

    def __lt__(self, other: "VertexId") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        return f"{self.tail}:{self.level}.{self.local}"

    def shifted(self, delta: int) -> "TailCopy":
        return TailCopy(self.tail, self.level + delta, self.local)


@total_ordering
@dataclass(frozen=True)
class FanCopy:
    fan: str
    index: int
    local: str

    def _key(self):
        return (2, self.fan, self.index, self.local)

    def __lt__(self, other: "VertexId") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        return f"{self.fan}#{self.index}.{self.local}"


VertexId = Union[Base, TailCopy, FanCopy]


def parse_vertex(text: str) -> VertexId:
    """Inverse of str() for the three id kinds."""
    if "#" in text:
        fan, rest = text.split("#", 1)
        index, local = rest.split(".", 1)
        return FanCopy(fan, int(index), local)
    if ":" in text:
        tail, rest = text.split(":", 1)
        level, local = rest.split(".", 1)
        return TailCopy(tail, int(level), local)
    return Base(text)


def shift_vertex(v: VertexId, tail: str, delta: int) -> VertexId:
    """Shift a vertex by `delta` levels of `tail`; other vertices unchanged."""
    if isinstance(v, TailCopy) and v.tail == tail:
        return v.shifted(delta)
    return v
