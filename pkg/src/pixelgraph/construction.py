"""Random nested sequences of pixelated graphs.

Stage 1 is an (m1, 1) graph with every column an independent fair coin.
Stage n+1 halves every row of stage n: inside each parent column, the child
columns choose the lower or upper half-row. The first and last child of every
parent block are fixed by a deterministic rule so that neighbouring blocks stay
connected; the remaining children are fair coins.

Randomness for stage ``i`` (0-based) and child column ``j`` is bit ``j`` of
``rng.child("stage", i)``, so the same graph can be materialized in full
(:func:`sample_nested`) or evaluated column by column (:class:`LazyNested`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import get_caps
from .errors import ProfileExhausted, ResourceCap, ShapeMismatch
from .pixel_graph import PixelGraph, _from_array, is_refinement
from .rng import Stream


@dataclass(frozen=True)
class Schedule:
    ms: tuple[int, ...]

    def __post_init__(self):
        ms = tuple(int(v) for v in self.ms)
        object.__setattr__(self, "ms", ms)
        if not ms:
            raise ShapeMismatch("schedule must be nonempty")
        if ms[0] < 1:
            raise ShapeMismatch("m1 must be >= 1")
        if any(b <= a for a, b in zip(ms, ms[1:])):
            raise ShapeMismatch(f"schedule {list(ms)} is not strictly increasing")

    def __len__(self):
        return len(self.ms)

    def __iter__(self):
        return iter(self.ms)

    def __getitem__(self, i):
        return self.ms[i]

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        return cls(tuple(int(t) for t in text.split(",") if t.strip()))


@dataclass(frozen=True)
class NestedSequence:
    graphs: tuple[PixelGraph, ...]
    seed: int
    schedule: Schedule

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "schedule": list(self.schedule.ms),
            "graphs": [g.to_json() for g in self.graphs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NestedSequence":
        graphs = tuple(PixelGraph.from_json(g) for g in obj["graphs"])
        seq = cls(graphs, int(obj["seed"]), Schedule(tuple(obj["schedule"])))
        for i, g in enumerate(graphs):
            if g.m != seq.schedule[i] or g.n != i + 1:
                raise ShapeMismatch(f"graph {i} has shape ({g.m},{g.n})")
        for a, b in zip(graphs, graphs[1:]):
            if not is_refinement(a, b):
                raise ShapeMismatch("graphs are not nested")
        return seq

    def dumps(self) -> str:
        return json.dumps(self.to_json())


SMALL_WIDTH = 512  # below this, plain lists beat numpy


def _initial_levels(m1: int, rng: Stream) -> np.ndarray:
    return 1 + rng.bits(1 << m1).astype(np.int64)


def _refine_small(parent: Sequence[int], shift: int, rng: Stream) -> list[int]:
    s = 1 << shift
    width = len(parent)
    word = 0
    for b in range((width * s + 511) // 512):
        word |= rng.block(b) << (512 * b)
    child = [2 * lv - 1 + ((word >> j) & 1) for j, lv in enumerate(v for v in parent for _ in range(s))]
    for k in range(width - 1):
        a, b = parent[k], parent[k + 1]
        child[k * s + s - 1] = 2 * a - 1 + (b == a + 1)
        child[(k + 1) * s] = 2 * b - 1 + (a == b + 1)
    child[0] = 2 * parent[0] - 1
    child[-1] = 2 * parent[-1] - 1
    return child


def _refine_levels(parent: np.ndarray, shift: int, rng: Stream) -> np.ndarray:
    s = 1 << shift
    width = parent.size
    child = np.repeat(2 * parent - 1, s) + rng.bits(width * s).astype(np.int64)
    lower = 2 * parent - 1
    step = parent[1:] - parent[:-1]
    # block k's right end and block k+1's left end
    child[s - 1 : width * s - 1 : s] = lower[:-1] + (step == 1)
    child[s : width * s : s] = lower[1:] + (step == -1)
    child[0] = lower[0]
    child[-1] = lower[-1]
    return child


def sample_initial(m1: int, rng: Stream) -> PixelGraph:
    if m1 < 1:
        raise ShapeMismatch("m1 must be >= 1")
    _check_width(m1)
    return _from_array(m1, 1, _initial_levels(m1, rng))


def refine(parent: PixelGraph, m_next: int, rng: Stream) -> PixelGraph:
    if m_next <= parent.m:
        raise ShapeMismatch(f"m_next={m_next} must exceed parent m={parent.m}")
    _check_width(m_next)
    shift = m_next - parent.m
    if (1 << m_next) <= SMALL_WIDTH:
        return PixelGraph(m_next, parent.n + 1, tuple(_refine_small(parent.levels, shift, rng)))
    return _from_array(m_next, parent.n + 1, _refine_levels(parent.as_array(), shift, rng))


def count_refinements(parent: PixelGraph, m_next: int) -> int:
    """Size of the support of :func:`refine`: ``2 ** (2**m_next - 2**(m+1))``."""
    if m_next <= parent.m:
        raise ShapeMismatch(f"m_next={m_next} must exceed parent m={parent.m}")
    return 2 ** ((1 << m_next) - (1 << (parent.m + 1)))


def _check_width(m: int) -> None:
    cap = get_caps().width
    if (1 << m) > cap:
        raise ResourceCap(f"2^{m} columns exceeds width cap {cap}")


def sample_nested(schedule: Schedule, stages: int, rng: Stream) -> NestedSequence:
    if not 1 <= stages <= len(schedule):
        raise ShapeMismatch(f"stages={stages} not in 1..{len(schedule)}")
    _check_width(schedule[stages - 1])
    levels = _initial_levels(schedule[0], rng.child("stage", 0))
    graphs = [_from_array(schedule[0], 1, levels)]
    for i in range(1, stages):
        levels = _refine_levels(levels, schedule[i] - schedule[i - 1], rng.child("stage", i))
        graphs.append(_from_array(schedule[i], i + 1, levels))
    return NestedSequence(tuple(graphs), rng.seed, Schedule(schedule.ms[:stages]))


class LazyNested:
    """Column-at-a-time view of the sequence :func:`sample_nested` would build.

    Levels are computed on demand and memoized, so a hit test that only looks at
    a few columns never materializes a graph of ``2**m`` columns.
    """

    def __init__(self, schedule: Schedule, stages: int, rng: Stream):
        if not 1 <= stages <= len(schedule):
            raise ShapeMismatch(f"stages={stages} not in 1..{len(schedule)}")
        self.ms = schedule.ms[:stages]
        self.streams = [rng.child("stage", i) for i in range(stages)]
        self._memo: list[dict[int, int]] = [{} for _ in range(stages)]

    def level(self, stage: int, j: int) -> int:
        memo = self._memo[stage]
        v = memo.get(j)
        if v is not None:
            return v
        if stage == 0:
            v = 1 + self.streams[0].bit(j)
        else:
            shift = self.ms[stage] - self.ms[stage - 1]
            s = 1 << shift
            k, r = j >> shift, j & (s - 1)
            lk = self.level(stage - 1, k)
            lower = 2 * lk - 1
            if r == 0:
                v = lower + (k > 0 and self.level(stage - 1, k - 1) == lk + 1)
            elif r == s - 1:
                last = (1 << self.ms[stage - 1]) - 1
                v = lower + (k < last and self.level(stage - 1, k + 1) == lk + 1)
            else:
                v = lower + self.streams[stage].bit(j)
        memo[j] = v
        return v

    def level_range(self, stage: int, first: int, last: int) -> tuple[int, int]:
        """(min, max) of the levels over columns ``first..last`` (0-based, inclusive)."""
        if stage == 0:
            vals = [self.level(0, j) for j in range(first, last + 1)]
            return min(vals), max(vals)
        shift = self.ms[stage] - self.ms[stage - 1]
        s = 1 << shift
        lo = hi = None
        stream = self.streams[stage]
        for k in range(first >> shift, (last >> shift) + 1):
            a = max(first, k * s)
            b = min(last, k * s + s - 1)
            lower = 2 * self.level(stage - 1, k) - 1
            seen = set()
            for j in (a, b):
                seen.add(self.level(stage, j))
            j = a + 1
            while j < b and len(seen) < 2:
                if j & (s - 1) not in (0, s - 1):
                    seen.add(lower + stream.bit(j))
                j += 1
            kmin, kmax = min(seen), max(seen)
            lo = kmin if lo is None else min(lo, kmin)
            hi = kmax if hi is None else max(hi, kmax)
        return lo, hi


Profile = Callable[[int], int]


def plan_schedule(profile: Profile, epsilon: float, stages: int, max_m: int = 40) -> Schedule:
    """Choose m1 < m2 < ... so each stage's failure bound fits its share of ``epsilon``.

    Stage k (1-based) needs ``2**-(i - 2) <= epsilon / 2**k``, where ``i`` is the
    profile at ``m1`` for k = 1 and at the block scale ``m - m_{k-1}`` after
    that. The block rescaling is a heuristic, not a derived bound.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    if stages < 1:
        raise ValueError("stages must be >= 1")
    ms: list[int] = []
    for n in range(stages):
        budget = epsilon / 2 ** (n + 1)
        base = ms[-1] if ms else 0
        for m in range(max(1, base + 1), max_m + 1):
            count = profile(m - base)
            if count >= 2 and 2.0 ** -(count - 2) <= budget:
                ms.append(m)
                break
        else:
            raise ProfileExhausted(f"no m <= {max_m} meets budget {budget} at stage {n + 1}")
    return Schedule(tuple(ms))
