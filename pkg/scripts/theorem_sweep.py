"""Final-stage hit probability for each model across a range of epsilon targets.

    python scripts/theorem_sweep.py --trials 2000 --out sweep.json
"""

import argparse
import json

from pixelgraph.construction import Schedule, plan_schedule
from pixelgraph.estimator import estimate_hits
from pixelgraph.random_set import cantor_profile, horizontal_profile

MODELS = {
    "cantor-shift": cantor_profile,
    "horizontal:1/3": horizontal_profile,
    "percolation:0.7:8": horizontal_profile,
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--stages", type=int, default=3)
    ap.add_argument("--depth", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--eps", default="0.5,0.2,0.1,0.05")
    ap.add_argument("--out")
    args = ap.parse_args()

    rows = []
    for model, profile in MODELS.items():
        for eps in (float(e) for e in args.eps.split(",")):
            schedule = plan_schedule(profile, eps, args.stages)
            res = estimate_hits(model, schedule, args.stages, args.trials, args.depth,
                                seed=args.seed, epsilon=eps, workers=args.workers)
            lo, hi = res.ci_per_stage[-1]
            rows.append({"model": model, "epsilon": eps, "schedule": list(schedule.ms),
                         "p_hat": float(res.p_hat_per_stage[-1]), "ci": [lo, hi], "pass": res.passes()})
            print(f"{model:20s} eps={eps:<5} schedule={list(schedule.ms)!s:14s} "
                  f"p_hat={float(res.p_hat_per_stage[-1]):.4f} ci=[{lo:.4f}, {hi:.4f}] "
                  f"{'ok' if res.passes() else 'MISS'}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
