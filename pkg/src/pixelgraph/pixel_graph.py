"""Pixelated (m, n) graphs on the unit square.

A graph at resolution (m, n) picks one row of height ``2**-n`` in each of the
``2**m`` columns of width ``2**-m``. Rows are numbered 1..2**n from the bottom.
The union of the chosen closed rectangles is connected exactly when
neighbouring rows differ by at most one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .config import get_caps
from .dyadic import as_fraction
from .errors import Disconnected, LengthMismatch, LevelOutOfRange, ResourceCap, ShapeMismatch

Interval = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle with exact rational corners."""

    x_lo: Fraction
    x_hi: Fraction
    y_lo: Fraction
    y_hi: Fraction

    def __post_init__(self):
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ValueError(f"degenerate rectangle {self}")

    def intersects(self, other: "Rect") -> bool:
        return (
            self.x_lo <= other.x_hi
            and other.x_lo <= self.x_hi
            and self.y_lo <= other.y_hi
            and other.y_lo <= self.y_hi
        )

    def contains(self, other: "Rect") -> bool:
        return (
            self.x_lo <= other.x_lo
            and other.x_hi <= self.x_hi
            and self.y_lo <= other.y_lo
            and other.y_hi <= self.y_hi
        )


@dataclass(frozen=True)
class DyadicInterval:
    """The closed interval ``[(index-1)/2**depth, index/2**depth]``."""

    depth: int
    index: int

    def __post_init__(self):
        if self.depth < 0 or not 1 <= self.index <= 1 << self.depth:
            raise ValueError(f"index {self.index} out of range at depth {self.depth}")

    @property
    def lo(self) -> Fraction:
        return Fraction(self.index - 1, 1 << self.depth)

    @property
    def hi(self) -> Fraction:
        return Fraction(self.index, 1 << self.depth)

    def contains_open(self, x) -> bool:
        x = as_fraction(x)
        return self.lo < x < self.hi

    def contains_closed(self, x) -> bool:
        x = as_fraction(x)
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class PixelGraph:
    m: int
    n: int
    levels: tuple[int, ...]

    @property
    def width(self) -> int:
        return 1 << self.m

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "levels": list(self.levels)}

    @classmethod
    def from_json(cls, obj: dict) -> "PixelGraph":
        return new_graph(obj["m"], obj["n"], obj["levels"])

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def as_array(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=np.int64)


def new_graph(m: int, n: int, levels: Sequence[int]) -> PixelGraph:
    if m < 0 or n < 1:
        raise ShapeMismatch(f"need m >= 0 and n >= 1, got m={m}, n={n}")
    levels = tuple(int(v) for v in levels)
    if len(levels) != 1 << m:
        raise LengthMismatch(f"expected {1 << m} levels, got {len(levels)}")
    top = 1 << n
    for k, v in enumerate(levels):
        if not 1 <= v <= top:
            raise LevelOutOfRange(f"levels[{k}] = {v} not in 1..{top}")
    for k in range(len(levels) - 1):
        if abs(levels[k + 1] - levels[k]) > 1:
            raise Disconnected(f"columns {k + 1} and {k + 2} jump from {levels[k]} to {levels[k + 1]}")
    return PixelGraph(m, n, levels)


def _from_array(m: int, n: int, levels: np.ndarray) -> PixelGraph:
    # internal constructor for arrays already known to be valid
    return PixelGraph(m, n, tuple(int(v) for v in levels))


def rectangles(g: PixelGraph) -> list[Rect]:
    cw = Fraction(1, 1 << g.m)
    rh = Fraction(1, 1 << g.n)
    return [Rect(k * cw, (k + 1) * cw, (lv - 1) * rh, lv * rh) for k, lv in enumerate(g.levels)]


def _check_width(m: int, n: int) -> None:
    cap = get_caps().width
    if (1 << m) > cap or (1 << n) > cap:
        raise ResourceCap(f"2^m={1 << m} or 2^n={1 << n} exceeds width cap {cap}")


def _matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    size = len(a)
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(a[i], bt[j])) for j in range(size)] for i in range(size)]


def count_connected(m: int, n: int) -> int:
    """Exact number of connected level assignments at resolution (m, n).

    Computes ``1^T T^(2^m - 1) 1`` with T the tridiagonal adjacency matrix on the
    ``2**n`` rows.
    """
    if m < 0 or n < 1:
        raise ShapeMismatch(f"need m >= 0 and n >= 1, got m={m}, n={n}")
    _check_width(m, n)
    rows = 1 << n
    steps = (1 << m) - 1
    if rows <= 64:
        # repeated squaring: m squarings, big-int entries
        t = [[1 if abs(a - b) <= 1 else 0 for b in range(rows)] for a in range(rows)]
        acc = None
        while steps:
            if steps & 1:
                acc = t if acc is None else _matmul(acc, t)
            steps >>= 1
            if steps:
                t = _matmul(t, t)
        if acc is None:
            return rows
        return sum(sum(row) for row in acc)
    v = [1] * rows
    for _ in range(steps):
        v = [
            (v[a - 1] if a > 0 else 0) + v[a] + (v[a + 1] if a + 1 < rows else 0)
            for a in range(rows)
        ]
    return sum(v)


def enumerate_connected(m: int, n: int) -> Iterator[PixelGraph]:
    """Every connected (m, n) graph exactly once, in lexicographic level order."""
    cap = get_caps().enumeration
    if count_connected(m, n) > cap:
        raise ResourceCap(f"more than {cap} graphs at (m={m}, n={n})")
    width = 1 << m
    top = 1 << n
    prefix: list[int] = []

    def extend() -> Iterator[PixelGraph]:
        if len(prefix) == width:
            yield PixelGraph(m, n, tuple(prefix))
            return
        if prefix:
            choices = range(max(1, prefix[-1] - 1), min(top, prefix[-1] + 1) + 1)
        else:
            choices = range(1, top + 1)
        for v in choices:
            prefix.append(v)
            yield from extend()
            prefix.pop()

    return extend()


def value_interval(g: PixelGraph, x) -> Interval:
    """Smallest closed interval containing the vertical section of ``g`` at ``x``."""
    x = as_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x={x} outside [0, 1]")
    t = x * g.width
    k = int(t)  # floor for nonnegative t
    rh = Fraction(1, 1 << g.n)
    if t == k and 0 < k < g.width:
        a, b = g.levels[k - 1], g.levels[k]
        return (min(a, b) - 1) * rh, max(a, b) * rh
    lv = g.levels[min(k, g.width - 1)]
    return (lv - 1) * rh, lv * rh


def is_refinement(coarse: PixelGraph, fine: PixelGraph) -> bool:
    if fine.n != coarse.n + 1 or fine.m <= coarse.m:
        raise ShapeMismatch(
            f"refinement needs n+1 rows and finer columns, got ({coarse.m},{coarse.n}) -> ({fine.m},{fine.n})"
        )
    shift = fine.m - coarse.m
    for j, lv in enumerate(fine.levels):
        parent = coarse.levels[j >> shift]
        if lv != 2 * parent - 1 and lv != 2 * parent:
            return False
    return True
