"""Annual savings versus BESS and DG rating on synthetic years.

    python scripts/run_sweep.py --seeds 0,1,2 --ratings 100,200,300,400,500,600,700,800
"""

import argparse
from pathlib import Path

from dcm.reports import emit_sweep
from dcm.sim import sensitivity_sweep
from dcm.strategy import StrategyChoice
from dcm.synthetic import ScenarioParams, generate_synthetic_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="0,1,2")
    ap.add_argument("--ratings", default="100,200,300,400,500")
    ap.add_argument("--strategy", default="s1")
    ap.add_argument("--x", type=int, default=2)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="out/sweep")
    args = ap.parse_args()

    ratings = [float(r) for r in args.ratings.split(",")]
    choice = StrategyChoice(args.strategy, args.x)
    for seed in (int(s) for s in args.seeds.split(",")):
        days = generate_synthetic_scenario(ScenarioParams(seed=seed)).days
        for resource in ("bess", "dg"):
            rows = sensitivity_sweep(days, resource, ratings, choice, workers=args.workers)
            emit_sweep(rows, Path(args.out) / f"seed{seed}", resource,
                       label=f"seed {seed}, {resource}, {choice.kind.label} x={choice.x}")
            print(f"seed {seed} {resource}:")
            for r in rows:
                extra = f"  per cycle ${r.savings_per_cycle:,.0f}" if resource == "bess" else ""
                print(f"  {r.rating_mw:6g} MW  ${r.savings / 1e6:8.3f}M  "
                      f"marginal ${r.marginal_per_mw:,.0f}/MW{extra}")


if __name__ == "__main__":
    main()
