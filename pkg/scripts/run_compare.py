"""Compare the five hour-selection strategies across synthetic years and BESS ratings.

Writes the normalized-savings grid (years x ratings) and per-month tables to --out.

    python scripts/run_compare.py --seeds 0,1,2 --ratings 100,200,300,400,500
"""

import argparse
import time

from dcm.dispatch import ResourceFleet
from dcm.reports import emit_comparison
from dcm.sim import compare_strategies, single_resource_fleet
from dcm.synthetic import ScenarioParams, generate_synthetic_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="0,1,2")
    ap.add_argument("--ratings", default="100,200,300,400,500")
    ap.add_argument("--resource", default="bess", choices=("bess", "dg"))
    ap.add_argument("--x", type=int, default=2)
    ap.add_argument("--payback-hour", action="store_true")
    ap.add_argument("--full-fleet", action="store_true",
                    help="use the default mixed fleet instead of a single-resource sweep")
    ap.add_argument("--out", default="out/compare")
    args = ap.parse_args()

    seeds = [int(s) for s in args.seeds.split(",")]
    ratings = [float(r) for r in args.ratings.split(",")]
    results = {}
    for seed in seeds:
        days = generate_synthetic_scenario(ScenarioParams(seed=seed)).days
        fleets = ([("default", ResourceFleet.default())] if args.full_fleet else
                  [(f"{r:g}", single_resource_fleet(args.resource, r)) for r in ratings])
        for label, fleet in fleets:
            t0 = time.perf_counter()
            cmp = compare_strategies(days, fleet, x=args.x, append_payback_hour=args.payback_hour)
            results[(f"seed{seed}", label)] = cmp
            best = max(cmp.normalized, key=cmp.normalized.get)
            print(f"seed {seed} {label:>8}: best {best.value} {best.label:<16}"
                  + " ".join(f"{s.value}={v:.3f}" for s, v in cmp.normalized.items())
                  + f"  ({time.perf_counter() - t0:.1f}s)")
    for path in emit_comparison(results, args.out):
        print(path)


if __name__ == "__main__":
    main()
