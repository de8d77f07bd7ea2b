"""HVAC payback moving the daily peak, with and without an appended payback hour.

Uses a hot August day and a fleet with twice the default HVAC population; prints
the planned and realized profiles around the evening peak.

    python scripts/payback_shift.py --scale 2
"""

import argparse

import numpy as np

from dcm.dispatch import ObjectiveConfig, ResourceFleet, evaluate_day, optimize
from dcm.strategy import StrategyChoice, select_hours
from dcm.synthetic import payback_demo_day


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=float, default=2.0, help="HVAC population multiplier")
    ap.add_argument("--strategy", default="s3")
    args = ap.parse_args()

    ctx = payback_demo_day()
    fleet = ResourceFleet.default().with_tcl_scaled(args.scale)
    window = range(14, 24)
    print("hour   " + " ".join(f"{h:>8d}" for h in window))
    print("actual " + " ".join(f"{ctx.actual[h]:8.1f}" for h in window))
    for appended in (False, True):
        hours = select_hours(StrategyChoice(args.strategy, 2, appended), ctx)
        s = optimize(ctx, hours, fleet, ObjectiveConfig(kind="f2"))
        out = evaluate_day(s, ctx.actual_load, ctx.temperature, fleet).mitigated.values
        tag = "with 20:00" if appended else "plain"
        print(f"\n{tag}: hours {hours.hours}, HVAC columns "
              f"{[list(map(int, c)) for c in s.tcl_columns]}, objective {s.objective_value:,.0f}")
        print("plan   " + " ".join(f"{s.predicted_day[h]:8.1f}" for h in window))
        print("real   " + " ".join(f"{out[h]:8.1f}" for h in window))
        print(f"peak over 17-20: {np.max(s.predicted_day[17:21]):.1f} MW")


if __name__ == "__main__":
    main()
