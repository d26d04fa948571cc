"""Random nested pixelated graphs and their hitting probabilities against random compact sets."""

from .construction import (
    LazyNested,
    NestedSequence,
    Schedule,
    count_refinements,
    plan_schedule,
    refine,
    sample_initial,
    sample_nested,
)
from .estimator import (
    EstimateResult,
    Lemma23Report,
    check_lemma23,
    estimate_hits,
    exact_hit_probability,
    verify_distance_bound,
    wilson_interval,
)
from .pixel_graph import (
    DyadicInterval,
    PixelGraph,
    Rect,
    count_connected,
    enumerate_connected,
    is_refinement,
    new_graph,
    rectangles,
    value_interval,
)
from .random_set import CellSet, ModelSpec, SetSample, ThickProfile, cover, intersects, parse_model, sample, thick_columns
from .rng import Stream

__version__ = "0.1.0"
