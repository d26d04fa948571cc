"""Random compact sets in the unit square and their dyadic outer approximations.

Four models are supported:

``horizontal:<h>``
    the segment ``[0,1] x {h}``.
``cantor-shift``
    ``(C/2 + U) x {V}`` with C the middle-thirds Cantor set, U uniform on
    [0, 1/2] and V uniform on [0, 1]. U and V are drawn on a 2**-54 grid.
``percolation:<p>:<dmax>``
    fractal percolation to depth ``dmax``, resampled until nonempty.
``function-graph:<path>``
    graph of the piecewise-linear function through ``2**j + 1`` equally spaced
    heights read from a JSON file.

A cover at depth d is the set of closed dyadic cells of side ``2**-d`` that meet
the set. Thick columns stand in for "the projection meets this open column in
an uncountable set", using a sound model-specific test.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import numpy as np

from .config import get_caps
from .dyadic import as_fraction, overlapping_cells
from .errors import DepthExceeded, InvalidParam, RejectionBudgetExceeded
from .pixel_graph import PixelGraph
from .rng import Stream

THIRD = Fraction(1, 3)


# --- cell sets -----------------------------------------------------------------


@dataclass(frozen=True)
class CellSet:
    """Closed union of dyadic cells ``(col, row)`` at a common depth, 1-based."""

    depth: int
    cells: frozenset

    def __post_init__(self):
        cells = frozenset((int(c), int(r)) for c, r in self.cells)
        object.__setattr__(self, "cells", cells)
        side = 1 << self.depth
        for c, r in cells:
            if not (1 <= c <= side and 1 <= r <= side):
                raise InvalidParam(f"cell {(c, r)} out of range at depth {self.depth}")

    def __len__(self):
        return len(self.cells)

    def __contains__(self, cell):
        return cell in self.cells

    def by_column(self) -> dict[int, list[int]]:
        cols: dict[int, list[int]] = {}
        for c, r in sorted(self.cells):
            cols.setdefault(c, []).append(r)
        return cols

    def within(self, other: "CellSet") -> bool:
        """True if every cell of ``self`` lies inside some cell of ``other`` (point-set inclusion)."""
        if self.depth < other.depth:
            return False
        shift = self.depth - other.depth
        return all((((c - 1) >> shift) + 1, ((r - 1) >> shift) + 1) in other.cells for c, r in self.cells)

    def to_json(self) -> dict:
        return {"depth": self.depth, "cells": [list(cell) for cell in sorted(self.cells)]}

    @classmethod
    def from_json(cls, obj: dict) -> "CellSet":
        return cls(int(obj["depth"]), frozenset(tuple(c) for c in obj["cells"]))

    @classmethod
    def full(cls, depth: int) -> "CellSet":
        side = 1 << depth
        return cls(depth, frozenset((c, r) for c in range(1, side + 1) for r in range(1, side + 1)))


def _rows_containing(y: Fraction, depth: int) -> list[int]:
    side = 1 << depth
    t = y * side
    k = int(t)
    if t == k:
        return [r for r in (k, k + 1) if 1 <= r <= side]
    return [k + 1]


# --- Cantor helpers --------------------------------------------------------------


def cantor_meets(a: Fraction, b: Fraction) -> bool:
    """Does the middle-thirds Cantor set meet the closed interval [a, b]?"""
    if b < a:
        return False
    seen = set()
    while True:
        if b < 0 or a > 1:
            return False
        if a <= 0 <= b or a <= 1 <= b:
            return True
        # now 0 < a <= b < 1
        if (a, b) in seen:
            # periodic ternary descent through nested stage intervals: a point of C
            return True
        seen.add((a, b))
        if b <= THIRD:
            a, b = 3 * a, 3 * b
        elif a >= 2 * THIRD:
            a, b = 3 * a - 2, 3 * b - 2
        elif a <= THIRD or b >= 2 * THIRD:
            return True  # touches an endpoint 1/3 or 2/3
        else:
            return False  # strictly inside the removed middle third


def _cantor_nodes(shift: Fraction, scale: Fraction, stop):
    """Depth-first walk of the stage intervals of ``scale*C + shift``.

    ``stop(lo, hi, stage)`` returns True to prune below a node.
    """
    stack = [(shift, shift + scale, 0)]
    while stack:
        lo, hi, stage = stack.pop()
        if stop(lo, hi, stage):
            continue
        third = (hi - lo) / 3
        stack.append((hi - third, hi, stage + 1))
        stack.append((lo, lo + third, stage + 1))


def cantor_cover_columns(shift: Fraction, depth: int) -> set[int]:
    """1-based columns at ``depth`` whose closed interval meets ``C/2 + shift``."""
    side = 1 << depth
    cols: set[int] = set()

    def closed_cols(x: Fraction) -> list[int]:
        t = x * side
        k = int(t)
        if t == k:
            return [c for c in (k, k + 1) if 1 <= c <= side]
        return [k + 1]

    def stop(lo, hi, stage):
        # endpoints of every stage interval belong to the set
        ends = set(closed_cols(lo)) | set(closed_cols(hi))
        cols.update(ends)
        first, last = overlapping_cells_1(lo, hi)
        return last - first + 1 <= len(ends) and all(c in ends for c in range(first, last + 1))

    def overlapping_cells_1(lo, hi):
        # 1-based closed-overlap column range of [lo, hi]
        a, b = lo * side, hi * side
        return max(1, -(-a.numerator // a.denominator)), min(side, int(b) + 1)

    _cantor_nodes(shift, Fraction(1, 2), stop)
    return cols


def cantor_thick_columns(shift: Fraction, m: int) -> set[int]:
    """Columns whose OPEN interval contains a whole stage-(m+2) interval of ``C/2 + shift``."""
    side = 1 << m
    max_stage = m + 2
    cols: set[int] = set()

    def stop(lo, hi, stage):
        k = int(lo * side)  # 0-based column holding lo (or starting at lo)
        if Fraction(k, side) < lo and hi < Fraction(k + 1, side):
            cols.add(k + 1)
            return True
        return stage >= max_stage

    _cantor_nodes(shift, Fraction(1, 2), stop)
    return cols


# --- model specs -----------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    params: tuple = ()
    text: str = ""

    def __str__(self):
        return self.text or self.kind


def parse_model(text: str) -> ModelSpec:
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind == "horizontal" and len(parts) == 2:
            h = as_fraction(parts[1])
            if not 0 <= h <= 1:
                raise InvalidParam(f"height {h} outside [0, 1]")
            return ModelSpec(kind, (h,), text)
        if kind == "cantor-shift" and len(parts) == 1:
            return ModelSpec(kind, (), text)
        if kind == "percolation" and len(parts) == 3:
            p, dmax = float(parts[1]), int(parts[2])
            if not 0 < p <= 1:
                raise InvalidParam(f"retention probability {p} outside (0, 1]")
            if not 0 <= dmax <= get_caps().max_percolation_depth:
                raise InvalidParam(f"dmax {dmax} outside 0..{get_caps().max_percolation_depth}")
            return ModelSpec(kind, (p, dmax), text)
        if kind == "function-graph" and len(parts) >= 2:
            path = ":".join(parts[1:])
            heights = load_heights(path)
            return ModelSpec(kind, (heights,), text)
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, InvalidParam):
            raise
        raise InvalidParam(f"bad model spec {text!r}: {exc}") from exc
    raise InvalidParam(f"unknown model spec {text!r}")


def load_heights(path) -> tuple[Fraction, ...]:
    obj = json.loads(Path(path).read_text())
    if isinstance(obj, dict):
        obj = obj.get("heights")
    return _check_heights(obj)


def _check_heights(values) -> tuple[Fraction, ...]:
    if not isinstance(values, (list, tuple)):
        raise InvalidParam("heights must be a list")
    heights = tuple(as_fraction(str(v) if isinstance(v, float) else v) for v in values)
    count = len(heights) - 1
    if count < 1 or count & (count - 1):
        raise InvalidParam(f"need 2**j + 1 heights, got {len(heights)}")
    if any(not 0 <= h <= 1 for h in heights):
        raise InvalidParam("heights must lie in [0, 1]")
    return heights


# --- samples ---------------------------------------------------------------------


class SetSample:
    """One realization of a random compact set."""

    model_id: str = ""

    @property
    def params(self) -> dict:
        return {}

    @property
    def max_depth(self) -> int:
        return get_caps().max_depth

    def _check_depth(self, d: int) -> None:
        if not 0 <= d <= self.max_depth:
            raise DepthExceeded(f"depth {d} outside 0..{self.max_depth} for {self.model_id}")

    def cover(self, d: int) -> CellSet:
        raise NotImplementedError

    def thick_columns(self, m: int) -> set[int]:
        raise NotImplementedError


@dataclass(frozen=True)
class HorizontalLine(SetSample):
    height: Fraction
    model_id = "horizontal"

    @property
    def params(self):
        return {"h": str(self.height)}

    def cover(self, d):
        self._check_depth(d)
        rows = _rows_containing(self.height, d)
        return CellSet(d, frozenset((c, r) for c in range(1, (1 << d) + 1) for r in rows))

    def thick_columns(self, m):
        self._check_depth(m)
        return set(range(1, (1 << m) + 1))


@dataclass(frozen=True)
class CantorShift(SetSample):
    shift: Fraction
    height: Fraction
    model_id = "cantor-shift"

    def __post_init__(self):
        if not (0 <= self.shift <= Fraction(1, 2) and 0 <= self.height <= 1):
            raise InvalidParam("cantor-shift needs U in [0, 1/2] and V in [0, 1]")

    @property
    def params(self):
        return {"U": str(self.shift), "V": str(self.height)}

    def contains(self, x, y) -> bool:
        x, y = as_fraction(x), as_fraction(y)
        return y == self.height and cantor_meets(2 * (x - self.shift), 2 * (x - self.shift))

    def cover(self, d):
        self._check_depth(d)
        rows = _rows_containing(self.height, d)
        cols = cantor_cover_columns(self.shift, d)
        return CellSet(d, frozenset((c, r) for c in cols for r in rows))

    def thick_columns(self, m):
        self._check_depth(m)
        return cantor_thick_columns(self.shift, m)


@dataclass(frozen=True, eq=False)
class Percolation(SetSample):
    """Retained cells are stored at the leaf depth only; ``leaves[col-1, row-1]``."""

    p: float
    dmax: int
    leaves: np.ndarray
    attempts: int = 1
    model_id = "percolation"

    @property
    def params(self):
        return {"p": self.p, "dmax": self.dmax, "attempts": self.attempts}

    @property
    def max_depth(self):
        return self.dmax

    def _pooled(self, d: int) -> np.ndarray:
        f = 1 << (self.dmax - d)
        side = 1 << d
        return self.leaves.reshape(side, f, side, f).any(axis=(1, 3))

    def cover(self, d):
        # depth-d cells with a surviving leaf below them
        self._check_depth(d)
        cols, rows = np.nonzero(self._pooled(d))
        return CellSet(d, frozenset(zip((cols + 1).tolist(), (rows + 1).tolist())))

    def thick_columns(self, m):
        self._check_depth(m)
        f = 1 << (self.dmax - m)
        cols = self.leaves.any(axis=1).reshape(1 << m, f).any(axis=1)
        return set((np.nonzero(cols)[0] + 1).tolist())


@dataclass(frozen=True)
class FunctionGraph(SetSample):
    heights: tuple
    model_id = "function-graph"

    @property
    def params(self):
        return {"heights": [str(h) for h in self.heights]}

    def value(self, x) -> Fraction:
        x = as_fraction(x)
        segs = len(self.heights) - 1
        t = x * segs
        i = min(int(t), segs - 1)
        frac = t - i
        return self.heights[i] + frac * (self.heights[i + 1] - self.heights[i])

    def cover(self, d):
        self._check_depth(d)
        side = 1 << d
        segs = len(self.heights) - 1
        seg_exp = segs.bit_length() - 1
        cells = set()
        for c in range(1, side + 1):
            xa, xb = Fraction(c - 1, side), Fraction(c, side)
            first, last = overlapping_cells(c - 1, c, d, seg_exp, segs)
            for i in range(first, last + 1):
                lo = max(xa, Fraction(i, segs))
                hi = min(xb, Fraction(i + 1, segs))
                ya, yb = sorted((self.value(lo), self.value(hi)))
                r0, r1 = _row_range(ya, yb, d)
                cells.update((c, r) for r in range(r0, r1 + 1))
        return CellSet(d, frozenset(cells))

    def thick_columns(self, m):
        self._check_depth(m)
        return set(range(1, (1 << m) + 1))


def _row_range(ya: Fraction, yb: Fraction, d: int) -> tuple[int, int]:
    """1-based rows at depth ``d`` whose closed interval meets ``[ya, yb]``."""
    side = 1 << d
    ta, tb = ya * side, yb * side
    first = max(1, -(-ta.numerator // ta.denominator))  # ceil(ta); row k spans [k-1, k]
    last = min(side, int(tb) + 1)
    return first, last


def sample(model: ModelSpec | str, rng: Stream) -> SetSample:
    if isinstance(model, str):
        model = parse_model(model)
    kind = model.kind
    if kind == "horizontal":
        return HorizontalLine(model.params[0])
    if kind == "cantor-shift":
        u = rng.child("U").dyadic(53) / 2
        v = rng.child("V").dyadic(53)
        return CantorShift(u, v)
    if kind == "function-graph":
        return FunctionGraph(model.params[0])
    if kind == "percolation":
        p, dmax = model.params
        return _sample_percolation(p, dmax, rng)
    raise InvalidParam(f"unknown model {kind!r}")


def _sample_percolation(p: float, dmax: int, rng: Stream) -> Percolation:
    budget = get_caps().rejection_budget
    for attempt in range(budget):
        alive = np.ones((1, 1), dtype=bool)
        for depth in range(1, dmax + 1):
            gen = rng.child("attempt", attempt, "depth", depth).generator()
            side = 1 << depth
            alive = np.kron(alive, np.ones((2, 2), dtype=bool)) & (gen.random((side, side)) < p)
            if not alive.any():
                break
        if alive.any():
            alive.setflags(write=False)
            return Percolation(p, dmax, alive, attempt + 1)
    raise RejectionBudgetExceeded(f"percolation p={p} died in all {budget} attempts")


def cover(s: SetSample, d: int) -> CellSet:
    return s.cover(d)


def thick_columns(s: SetSample, m: int) -> set[int]:
    return s.thick_columns(m)


@dataclass(frozen=True)
class ThickProfile:
    counts: dict = field(default_factory=dict)

    def __call__(self, m: int) -> int:
        return self.counts[m]


def thick_profile(s: SetSample, ms: Iterable[int]) -> ThickProfile:
    return ThickProfile({m: len(s.thick_columns(m)) for m in ms})


# --- intersection ----------------------------------------------------------------


def column_ranges(cells: CellSet, m: int) -> Iterable[tuple[int, int, list[int]]]:
    """For each occupied cell column: the 0-based graph-column range at ``2**-m`` it touches, and its rows."""
    width = 1 << m
    for c, rows in cells.by_column().items():
        first, last = overlapping_cells(c - 1, c, cells.depth, m, width)
        yield first, last, rows


def level_window(row: int, depth: int, n: int) -> tuple[int, int]:
    """1-based graph rows at ``2**-n`` whose closed interval meets cell row ``row`` at ``depth``."""
    first, last = overlapping_cells(row - 1, row, depth, n, 1 << n)
    return first + 1, last + 1


def hits_range(lo: int, hi: int, rows: list[int], depth: int, n: int) -> bool:
    """Do graph levels spanning ``lo..hi`` touch any of the cell rows?

    A connected graph takes every level between its min and max over a column
    range, so the range check is exact.
    """
    for r in rows:
        a, b = level_window(r, depth, n)
        if max(a, lo) <= min(b, hi):
            return True
    return False


def intersects(c: CellSet, g: PixelGraph) -> bool:
    """Closed-set intersection of the cell union with the graph's rectangles."""
    levels = g.as_array()
    for first, last, rows in column_ranges(c, g.m):
        window = levels[first : last + 1]
        if hits_range(int(window.min()), int(window.max()), rows, c.depth, g.n):
            return True
    return False


# --- planning profiles -------------------------------------------------------------

CANTOR_PROFILE_GRID = 8  # shifts k / 2**(GRID+1), k = 0..2**GRID, cover [0, 1/2]


@lru_cache(maxsize=None)
def cantor_profile(m: int) -> int:
    """Fewest thick columns at scale ``2**-m`` over a grid of Cantor shifts."""
    steps = 1 << CANTOR_PROFILE_GRID
    return min(
        len(cantor_thick_columns(Fraction(k, 2 * steps), m)) for k in range(steps + 1)
    )


def horizontal_profile(m: int) -> int:
    return 1 << m


def file_profile(path) -> ThickProfile:
    obj = json.loads(Path(path).read_text())
    counts = obj.get("counts", obj) if isinstance(obj, dict) else dict(obj)
    return ThickProfile({int(k): int(v) for k, v in counts.items()})


def planning_profile(name: str):
    """Resolve ``horizontal``, ``cantor`` or ``file:PATH`` to a callable m -> i(m)."""
    if name == "horizontal":
        return horizontal_profile
    if name == "cantor":
        return cantor_profile
    if name.startswith("file:"):
        prof = file_profile(name[5:])
        return lambda m: prof.counts.get(m, 0)
    raise InvalidParam(f"unknown profile {name!r}")
