"""Command-line driver.

Exit codes: 0 success, 1 configuration or usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from datetime import date
from pathlib import Path

from .config import ConfigError, RunConfig, load_config, parse_switch
from .core import validate_day_context
from .data import load_scenario_dir, save_scenario
from .dispatch import DispatchSpaceTooLarge, evaluate_day, optimize
from .reports import _write, dispatch_rows, emit_comparison, emit_reports, emit_sweep
from .sim import DataError, DayRecord, compare_strategies, sensitivity_sweep, simulate_year
from .strategy import Strategy, StrategyChoice, select_hours
from .synthetic import generate_synthetic_scenario

log = logging.getLogger("dcm")

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _ratings(text):
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ratings list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty ratings list")
    return vals


def _ints(text):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dcm", description="Coordinated demand-charge mitigation simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, strategy=True):
        sp.add_argument("--config", help="INI-style run configuration")
        sp.add_argument("--seed", type=int, help="synthetic scenario seed (overrides config)")
        sp.add_argument("--out", help="output directory")
        if strategy:
            sp.add_argument("--strategy", choices=[s.value for s in Strategy])
            sp.add_argument("--x", type=int, help="number of top hours")
            sp.add_argument("--payback-hour", choices=("on", "off"))

    common(sub.add_parser("gen", help="write a synthetic scenario as CSV files"), strategy=False)
    common(sub.add_parser("run", help="simulate one strategy over the scenario"))
    cp = sub.add_parser("compare", help="compare strategies s1-s5")
    common(cp)
    cp.add_argument("--seeds", type=_ints, help="comma-separated synthetic seeds (one year each)")
    cp.add_argument("--resource", choices=("bess", "dg"))
    cp.add_argument("--ratings", type=_ratings)
    sp = sub.add_parser("sweep", help="annual savings versus BESS or DG rating")
    common(sp)
    sp.add_argument("--resource", choices=("bess", "dg"))
    sp.add_argument("--ratings", type=_ratings)
    sp.add_argument("--workers", type=int, default=1)
    dp = sub.add_parser("day", help="dump the dispatch of a single day")
    common(dp)
    dp.add_argument("--date", required=True, help="YYYY-MM-DD")
    return p


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, data=replace(cfg.data, scenario=replace(cfg.data.scenario, seed=args.seed)))
    choice = cfg.strategy
    kind = Strategy.parse(args.strategy) if getattr(args, "strategy", None) else choice.kind
    x = args.x if getattr(args, "x", None) is not None else choice.x
    payback = choice.append_payback_hour
    if getattr(args, "payback_hour", None) is not None:
        payback = parse_switch(args.payback_hour)
    try:
        choice = StrategyChoice(kind, x, payback and kind.horizonal)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg = replace(cfg, strategy=choice)
    if getattr(args, "out", None):
        cfg = replace(cfg, output_dir=Path(args.out))
    return cfg


def _days(cfg: RunConfig, seed=None):
    if cfg.data.kind == "csv" and seed is None:
        return load_scenario_dir(cfg.data.directory)
    params = cfg.data.scenario if seed is None else replace(cfg.data.scenario, seed=seed)
    return generate_synthetic_scenario(params).days


def cmd_gen(cfg, args):
    days = generate_synthetic_scenario(cfg.data.scenario).days
    for path in save_scenario(days, cfg.output_dir):
        print(path)


def cmd_run(cfg, args):
    report = simulate_year(_days(cfg), cfg.fleet, cfg.strategy, cfg.tariff, cfg.gate,
                           cfg.objective, cfg.tcl_months)
    emit_reports(report, cfg.output_dir)
    print(f"{cfg.strategy.kind.value}: annual savings ${report.savings:,.2f} -> {cfg.output_dir}")


def cmd_compare(cfg, args):
    from .sim import single_resource_fleet
    seeds = args.seeds or (None,)
    results = {}
    for seed in seeds:
        days = _days(cfg, seed)
        year = f"seed{seed if seed is not None else cfg.data.scenario.seed}"
        fleets = [("config", cfg.fleet)]
        if args.ratings:
            resource = args.resource or cfg.sweep.resource
            fleets = [(f"{r:g}", single_resource_fleet(resource, r, cfg.sweep.duration_hours, cfg.fleet))
                      for r in args.ratings]
        for label, fleet in fleets:
            results[(year, label)] = compare_strategies(
                days, fleet, cfg.tariff, cfg.strategy.x, cfg.strategy.append_payback_hour,
                cfg.gate, cfg.objective, cfg.tcl_months)
    emit_comparison(results, cfg.output_dir)
    for (year, label), cmp in results.items():
        best = max(cmp.normalized, key=lambda s: cmp.normalized[s])
        print(f"{year} {label}: best {best.value} ({best.label})")


def cmd_sweep(cfg, args):
    resource = args.resource or cfg.sweep.resource
    ratings = args.ratings or cfg.sweep.ratings
    rows = sensitivity_sweep(_days(cfg), resource, ratings, cfg.strategy, cfg.tariff, cfg.gate,
                             cfg.objective, cfg.sweep.duration_hours, cfg.fleet, args.workers)
    emit_sweep(rows, cfg.output_dir, resource)
    for r in rows:
        print(f"{r.rating_mw:g} MW: ${r.savings:,.2f} (marginal ${r.marginal_per_mw:,.2f}/MW)")


def cmd_day(cfg, args):
    try:
        when = date.fromisoformat(args.date)
    except ValueError:
        raise ConfigError(f"bad --date {args.date!r}") from None
    matches = [d for d in _days(cfg) if d.date == when]
    if not matches:
        raise DataError(f"no data for {when}")
    ctx = matches[0]
    problems = validate_day_context(ctx)
    if problems:
        raise DataError("; ".join(map(str, problems)))
    fleet = cfg.fleet if when.month in cfg.tcl_months else cfg.fleet.without_tcl()
    hours = select_hours(cfg.strategy, ctx)
    schedule = optimize(ctx, hours, fleet, cfg.objective.for_strategy(cfg.strategy.kind))
    outcome = evaluate_day(schedule, ctx.actual_load, ctx.temperature, fleet)
    rec = DayRecord(when, True, schedule, ctx.forecast, ctx.actual, outcome.mitigated.values)
    lines = list(dispatch_rows(rec))
    path = _write(Path(cfg.output_dir) / "dispatch" / f"{when.isoformat()}.csv", lines)
    print("\n".join(lines))
    print(f"objective {schedule.objective_value:.2f}; predicted peak {schedule.predicted_peak_mw:.4f} MW; {path}")


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "compare": cmd_compare, "sweep": cmd_sweep, "day": cmd_day}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_CONFIG
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        COMMANDS[args.command](cfg, args)
    except (ConfigError, DispatchSpaceTooLarge) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
