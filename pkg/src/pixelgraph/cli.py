"""Command-line driver.

Exit codes: 0 success, 1 the run's pass/fail predicate failed, 2 bad flags or
invalid input (a JSON error object goes to stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .construction import NestedSequence, Schedule, plan_schedule, sample_nested
from .errors import PixelGraphError
from .estimator import DEFAULT_Z, check_lemma23, estimate_hits
from .pixel_graph import PixelGraph, count_connected, enumerate_connected
from .random_set import CellSet, parse_model, planning_profile, sample
from .rng import Stream
from .svg import render


DEFAULT_DEPTH = 8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(obj, out: str | None) -> None:
    text = _dump(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_count(args) -> int:
    print(count_connected(args.m, args.n))
    return 0


def cmd_enumerate(args) -> int:
    _emit([g.to_json() for g in enumerate_connected(args.m, args.n)], args.out)
    return 0


def _resolve_schedule(args) -> Schedule:
    if args.schedule:
        return Schedule.parse(args.schedule)
    if args.profile:
        return plan_schedule(planning_profile(args.profile), args.epsilon, args.stages)
    raise UsageError("one of --schedule or --profile is required")


def cmd_simulate(args) -> int:
    model = parse_model(args.model)
    schedule = _resolve_schedule(args)
    stages = args.stages or len(schedule)
    depth = args.depth
    if depth is None:
        depth = DEFAULT_DEPTH
        if model.kind == "percolation":
            depth = min(depth, model.params[1])
    result = estimate_hits(
        model, schedule, stages, args.trials, depth,
        seed=args.seed, epsilon=args.epsilon, z=args.z, workers=args.workers,
    )
    _emit(result.to_json(), args.out)
    if args.out:
        print(f"final-stage lower bound {result.final_lower:.6f} vs target {1 - args.epsilon:.6f}")
    return 0 if result.passes() else 1


def cmd_plan(args) -> int:
    schedule = plan_schedule(planning_profile(args.profile), args.epsilon, args.stages, max_m=args.max_m)
    _emit({"profile": args.profile, "epsilon": args.epsilon, "schedule": list(schedule.ms)}, args.out)
    return 0


def cmd_check_lemma23(args) -> int:
    s = sample(parse_model(args.model), Stream(args.seed).child("set"))
    report = check_lemma23(s, args.m1, args.depth, args.ends_fixed)
    _emit(report.to_json(), args.out)
    return 0 if report.satisfied else 1


def cmd_cover(args) -> int:
    s = sample(parse_model(args.model), Stream(args.seed).child("set"))
    _emit(s.cover(args.depth).to_json(), args.out)
    return 0


def cmd_sample(args) -> int:
    schedule = Schedule.parse(args.schedule)
    seq = sample_nested(schedule, args.stages or len(schedule), Stream(args.seed))
    _emit(seq.to_json(), args.out)
    return 0


def _load_graphs(path: str) -> list[PixelGraph]:
    obj = json.loads(Path(path).read_text())
    if isinstance(obj, list):
        return [PixelGraph.from_json(g) for g in obj]
    if "graphs" in obj:
        return list(NestedSequence.from_json(obj).graphs)
    return [PixelGraph.from_json(obj)]


def cmd_render(args) -> int:
    graphs = _load_graphs(args.input)
    overlay = CellSet.from_json(json.loads(Path(args.overlay).read_text())) if args.overlay else None
    Path(args.out).write_text(render(graphs, overlay))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pixelgraph", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("count", help="number of connected (m, n) graphs")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.set_defaults(func=cmd_count)

    e = sub.add_parser("enumerate", help="all connected (m, n) graphs as JSON")
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("simulate", help="Monte Carlo hit probabilities per stage")
    s.add_argument("--model", required=True)
    s.add_argument("--schedule", help="comma-separated m1,m2,...")
    s.add_argument("--profile", help="plan the schedule from horizontal|cantor|file:PATH")
    s.add_argument("--stages", type=int)
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--depth", type=int, help=f"cover depth (default {DEFAULT_DEPTH}, at most dmax for percolation)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--epsilon", type=float, default=0.1)
    s.add_argument("--z", type=float, default=DEFAULT_Z)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    pl = sub.add_parser("plan", help="choose m1 < m2 < ... from a thick-column profile")
    pl.add_argument("--profile", required=True)
    pl.add_argument("--epsilon", type=float, required=True)
    pl.add_argument("--stages", type=int, required=True)
    pl.add_argument("--max-m", type=int, default=40)
    pl.add_argument("--out")
    pl.set_defaults(func=cmd_plan)

    l23 = sub.add_parser("check-lemma23", help="exact first-stage hit probability vs its lower bound")
    l23.add_argument("--model", required=True)
    l23.add_argument("--m1", type=int, required=True)
    l23.add_argument("--depth", type=int, required=True)
    l23.add_argument("--ends-fixed", action="store_true")
    l23.add_argument("--seed", type=int, default=0)
    l23.add_argument("--out")
    l23.set_defaults(func=cmd_check_lemma23)

    cv = sub.add_parser("cover", help="dyadic cover of one sampled set as JSON")
    cv.add_argument("--model", required=True)
    cv.add_argument("--depth", type=int, required=True)
    cv.add_argument("--seed", type=int, default=0)
    cv.add_argument("--out")
    cv.set_defaults(func=cmd_cover)

    sm = sub.add_parser("sample", help="one random nested sequence as JSON")
    sm.add_argument("--schedule", required=True)
    sm.add_argument("--stages", type=int)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--out")
    sm.set_defaults(func=cmd_sample)

    r = sub.add_parser("render", help="SVG of graphs with an optional cover overlay")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--overlay")
    r.set_defaults(func=cmd_render)
    return p


def _fail(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return 2


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail("usage", str(exc))
    except PixelGraphError as exc:
        return _fail(exc.code, str(exc))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        return _fail("input", str(exc))
    except ValueError as exc:
        return _fail("invalid_param", str(exc))


def main() -> None:
    sys.exit(run())
