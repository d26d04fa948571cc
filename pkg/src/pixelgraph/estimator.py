"""Exact and Monte Carlo hitting probabilities.

Hitting is always evaluated against the outer cover of the set, never the set
itself, so estimates can only err towards more hits.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import get_caps
from .construction import LazyNested, NestedSequence, Schedule
from .dyadic import overlapping_cells
from .errors import ResourceCap, ShapeMismatch, TrialsTooSmall
from .pixel_graph import value_interval
from .random_set import (
    CellSet,
    ModelSpec,
    SetSample,
    column_ranges,
    hits_range,
    intersects,
    parse_model,
    sample,
)
from .rng import Stream

DEFAULT_Z = 2.576
MIN_TRIALS = 100


def _sig(x: float) -> float:
    return float(f"{x:.12g}")


def wilson_interval(hits: int, trials: int, z: float = DEFAULT_Z) -> tuple[float, float]:
    if trials < 1 or not 0 <= hits <= trials or z <= 0:
        raise ValueError(f"bad Wilson inputs hits={hits}, trials={trials}, z={z}")
    p = hits / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if hits == 0 else min(p, max(0.0, center - half))
    hi = 1.0 if hits == trials else max(p, min(1.0, center + half))
    return lo, hi


@dataclass(frozen=True)
class EstimateResult:
    trials: int
    hits_per_stage: tuple[int, ...]
    ms: tuple[int, ...]
    epsilon: float
    depth_used: int
    z: float = DEFAULT_Z

    @property
    def p_hat_per_stage(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(h, self.trials) for h in self.hits_per_stage)

    @property
    def ci_per_stage(self) -> tuple[tuple[float, float], ...]:
        return tuple(wilson_interval(h, self.trials, self.z) for h in self.hits_per_stage)

    @property
    def final_lower(self) -> float:
        return self.ci_per_stage[-1][0]

    def passes(self) -> bool:
        """Final-stage Wilson lower bound at least ``1 - epsilon``."""
        return self.final_lower >= 1 - self.epsilon

    def to_json(self) -> dict:
        stages = []
        for i, (h, (lo, hi)) in enumerate(zip(self.hits_per_stage, self.ci_per_stage)):
            stages.append(
                {
                    "n": i + 1,
                    "m": self.ms[i],
                    "hits": h,
                    "p_hat": _sig(h / self.trials),
                    "ci": [_sig(lo), _sig(hi)],
                }
            )
        return {"trials": self.trials, "epsilon": _sig(self.epsilon), "depth": self.depth_used, "stages": stages}

    @classmethod
    def from_json(cls, obj: dict, z: float = DEFAULT_Z) -> "EstimateResult":
        stages = obj["stages"]
        return cls(
            trials=int(obj["trials"]),
            hits_per_stage=tuple(int(s["hits"]) for s in stages),
            ms=tuple(int(s["m"]) for s in stages),
            epsilon=float(obj["epsilon"]),
            depth_used=int(obj["depth"]),
            z=z,
        )


@dataclass(frozen=True)
class Lemma23Report:
    m1: int
    i_m1: int
    bound: Fraction
    exact_p: Fraction
    ends_fixed: bool

    @property
    def satisfied(self) -> bool:
        return self.exact_p >= self.bound

    def to_json(self) -> dict:
        return {
            "m1": self.m1,
            "i_m1": self.i_m1,
            "ends_fixed": self.ends_fixed,
            "bound": str(self.bound),
            "exact_p": str(self.exact_p),
            "satisfied": self.satisfied,
        }


# --- exact enumeration -----------------------------------------------------------


def _column_hit_mask(cells: CellSet, m1: int) -> np.ndarray:
    """mask[k, v-1]: does column k at row v of an (m1, 1) graph touch the cells?"""
    mask = np.zeros((1 << m1, 2), dtype=bool)
    for first, last, rows in column_ranges(cells, m1):
        for v in (1, 2):
            if hits_range(v, v, rows, cells.depth, 1):
                mask[first : last + 1, v - 1] = True
    return mask


def exact_hit_probability(cells: CellSet, m1: int, ends_fixed: bool = False) -> Fraction:
    """Fraction of (m1, 1) graphs meeting ``cells``, by enumerating every graph.

    With ``ends_fixed`` the first and last columns sit on row 1, the value the
    refinement rule gives the outer ends; only the middle columns vary.
    """
    if m1 < 1:
        raise ShapeMismatch("m1 must be >= 1")
    width = 1 << m1
    free = width - 2 if ends_fixed else width
    total = 1 << free
    if total > get_caps().enumeration:
        raise ResourceCap(f"{total} graphs at m1={m1} exceeds enumeration cap")
    mask = _column_hit_mask(cells, m1)
    codes = np.arange(total, dtype=np.int64)[:, None]
    bits = (codes >> np.arange(free, dtype=np.int64)) & 1
    if ends_fixed:
        zeros = np.zeros((total, 1), dtype=np.int64)
        bits = np.hstack([zeros, bits, zeros]) if width > 1 else zeros
    hit = mask[np.arange(width), bits].any(axis=1)
    return Fraction(int(hit.sum()), total)


def check_lemma23(s: SetSample, m1: int, cover_depth: int, ends_fixed: bool = False) -> Lemma23Report:
    i_m1 = len(s.thick_columns(m1))
    loss = i_m1 - 2 if ends_fixed else i_m1
    bound = 1 - Fraction(2) ** -loss
    exact_p = exact_hit_probability(s.cover(cover_depth), m1, ends_fixed)
    return Lemma23Report(m1, i_m1, bound, exact_p, ends_fixed)


# --- Monte Carlo -----------------------------------------------------------------


def stage_hits(cells: CellSet, lazy: LazyNested) -> list[bool]:
    """Per stage: does the cover meet G_n? Evaluated column by column."""
    columns = cells.by_column()
    out = []
    for i, m in enumerate(lazy.ms):
        width = 1 << m
        hit = False
        for c, rows in columns.items():
            first, last = overlapping_cells(c - 1, c, cells.depth, m, width)
            lo, hi = lazy.level_range(i, first, last)
            if hits_range(lo, hi, rows, cells.depth, i + 1):
                hit = True
                break
        out.append(hit)
    return out


def trial_streams(seed: int, t: int) -> tuple[Stream, Stream]:
    root = Stream(seed).child("trial", t)
    return root.child("set"), root.child("graph")


def _run_trials(model: ModelSpec, ms: tuple, stages: int, depth: int, seed: int, start: int, stop: int) -> list[int]:
    schedule = Schedule(ms)
    counts = [0] * stages
    for t in range(start, stop):
        set_rng, graph_rng = trial_streams(seed, t)
        k = sample(model, set_rng)
        lazy = LazyNested(schedule, stages, graph_rng)
        for i, h in enumerate(stage_hits(k.cover(depth), lazy)):
            counts[i] += h
    return counts


def estimate_hits(
    model: ModelSpec | str,
    schedule: Schedule,
    stages: int,
    trials: int,
    cover_depth: int,
    seed: int = 0,
    epsilon: float = 0.1,
    z: float = DEFAULT_Z,
    workers: int = 1,
) -> EstimateResult:
    if isinstance(model, str):
        model = parse_model(model)
    if trials < MIN_TRIALS:
        raise TrialsTooSmall(f"trials={trials} < {MIN_TRIALS}")
    if not 1 <= stages <= len(schedule):
        raise ShapeMismatch(f"stages={stages} not in 1..{len(schedule)}")
    if cover_depth < stages:
        raise ShapeMismatch(f"cover depth {cover_depth} coarser than {stages} stages")
    ms = schedule.ms[:stages]
    if workers <= 1:
        counts = _run_trials(model, ms, stages, cover_depth, seed, 0, trials)
    else:
        bounds = np.linspace(0, trials, workers * 4 + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_trials, model, ms, stages, cover_depth, seed, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:])
                if b > a
            ]
            counts = [0] * stages
            for f in futures:
                counts = [x + y for x, y in zip(counts, f.result())]
    return EstimateResult(trials, tuple(counts), ms, epsilon, cover_depth, z)


# --- distance bound --------------------------------------------------------------


def verify_distance_bound(s: SetSample, seq: NestedSequence, cover_depth: int) -> bool:
    """Every hitting stage n has a cover cell within ``2**-n + 2**-depth`` of the last graph.

    The distance is vertical: between the cell's y-interval and the section of
    the last graph at the centre of the stage-n column the cell touches.
    """
    if cover_depth < len(seq.graphs):
        raise ShapeMismatch("cover depth must be at least the number of stages")
    cells = s.cover(cover_depth)
    last = seq.graphs[-1]
    side = 1 << cover_depth
    slack = Fraction(1, side)
    for g in seq.graphs:
        if not intersects(cells, g):
            continue
        allowed = Fraction(1, 1 << g.n) + slack
        ok = False
        for first, last_col, rows in column_ranges(cells, g.m):
            for k in range(first, last_col + 1):
                lv = g.levels[k]
                hit_rows = [r for r in rows if hits_range(lv, lv, [r], cover_depth, g.n)]
                if not hit_rows:
                    continue
                lo, hi = value_interval(last, Fraction(2 * k + 1, 2 << g.m))
                for r in hit_rows:
                    y_lo, y_hi = Fraction(r - 1, side), Fraction(r, side)
                    gap = max(Fraction(0), lo - y_hi, y_lo - hi)
                    if gap <= allowed:
                        ok = True
                        break
                if ok:
                    break
            if ok:
                break
        if not ok:
            return False
    return True
