"""Daily simulation loop, demand-charge billing, strategy comparison and sizing sweeps."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import timedelta
from typing import Optional, Sequence

import numpy as np

from .core import HOURS_PER_DAY, HourlyProfile, validate_day_context
from .dispatch import DispatchSchedule, ObjectiveConfig, ResourceFleet, evaluate_day, optimize
from .resources import BessSpec, DgSpec
from .strategy import (DayCosts, GateConfig, Strategy, StrategyChoice, gate, new_ledger,
                       select_hours, update_ledger)

log = logging.getLogger(__name__)

SUMMER_DR_MONTHS = (6, 7, 8, 9)


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class Tariff:
    demand_rate: float = 20.0  # $/kW-month

    def __post_init__(self):
        if self.demand_rate < 0:
            raise ValueError("demand_rate must be >= 0")


def monthly_demand_charge(peak_mw: float, tariff: Tariff = Tariff()) -> float:
    if peak_mw < 0:
        raise ValueError("peak must be >= 0")
    return peak_mw * 1000.0 * tariff.demand_rate


@dataclass(frozen=True)
class MonthResult:
    month: tuple
    baseline_peak_mw: float
    mitigated_peak_mw: float
    baseline_charge: float
    mitigated_charge: float
    operating_cost: float
    dr_hours: int
    battery_cycles: float
    discharged_mwh: float
    dispatch_days: int
    payback_shift_hours: int

    @property
    def savings(self) -> float:
        return self.baseline_charge - self.mitigated_charge - self.operating_cost

    @property
    def negative(self) -> bool:
        return self.savings < 0

    @property
    def payback_shift(self) -> bool:
        """Mitigated monthly peak above the unmitigated one (peak moved by payback)."""
        return self.mitigated_peak_mw > self.baseline_peak_mw + 1e-9


@dataclass(frozen=True, eq=False)
class DayRecord:
    date: object
    ran: bool
    schedule: Optional[DispatchSchedule]
    forecast: np.ndarray
    actual: np.ndarray
    mitigated: np.ndarray


@dataclass(frozen=True, eq=False)
class AnnualReport:
    label: str
    months: tuple
    days: tuple = ()

    @property
    def savings(self) -> float:
        return float(sum(m.savings for m in self.months))

    @property
    def battery_cycles(self) -> float:
        return float(sum(m.battery_cycles for m in self.months))

    @property
    def operating_cost(self) -> float:
        return float(sum(m.operating_cost for m in self.months))

    @property
    def flags(self) -> tuple:
        out = []
        for m in self.months:
            tag = f"{m.month[0]}-{m.month[1]:02d}"
            if m.negative:
                out.append(f"{tag}: negative savings")
            if m.payback_shift:
                out.append(f"{tag}: payback shifted the monthly peak")
        return tuple(out)

    def monthly_savings(self) -> dict:
        return {m.month[1]: m.savings for m in self.months}


def _month_result(ledger, tariff) -> MonthResult:
    return MonthResult(
        month=ledger.month,
        baseline_peak_mw=ledger.baseline_peak_mw,
        mitigated_peak_mw=ledger.historical_peak_mw,
        baseline_charge=monthly_demand_charge(ledger.baseline_peak_mw, tariff),
        mitigated_charge=monthly_demand_charge(ledger.historical_peak_mw, tariff),
        operating_cost=ledger.operating_cost_dollars,
        dr_hours=ledger.dr_hours,
        battery_cycles=ledger.battery_cycles,
        discharged_mwh=ledger.discharged_mwh,
        dispatch_days=ledger.dispatch_days,
        payback_shift_hours=ledger.payback_shift_hours,
    )


def _check_days(days):
    if not days:
        raise DataError("no days to simulate")
    for i, ctx in enumerate(days):
        problems = validate_day_context(ctx)
        if problems:
            raise DataError(f"{ctx.date}: " + "; ".join(map(str, problems)))
        if i and ctx.date != days[i - 1].date + timedelta(days=1):
            raise DataError(f"missing day data between {days[i - 1].date} and {ctx.date}")


def simulate_year(days: Sequence, fleet: ResourceFleet, choice: StrategyChoice = StrategyChoice(),
                  tariff: Tariff = Tariff(), gate_cfg: GateConfig = GateConfig(),
                  obj_cfg: ObjectiveConfig = ObjectiveConfig(), tcl_months=SUMMER_DR_MONTHS,
                  keep_days: bool = True, label: str = "") -> AnnualReport:
    """Run gate, hour selection, dispatch and ex-post evaluation for consecutive days."""
    days = tuple(getattr(days, "days", days))
    _check_days(days)
    obj_cfg = obj_cfg.for_strategy(choice.kind)
    off_season = fleet.without_tcl()
    ledger = None
    months, records = [], []
    carry = np.zeros(0)
    for ctx in days:
        month = (ctx.date.year, ctx.date.month)
        if ledger is not None and ledger.month != month:
            months.append(_month_result(ledger, tariff))
            ledger = None
        if ledger is None:
            ledger = new_ledger(month)
        schedule = None
        costs = DayCosts()
        mitigated = np.array(ctx.actual, dtype=float)
        if not fleet.empty and gate(ctx, ledger, gate_cfg):
            day_fleet = fleet if ctx.date.month in tcl_months else off_season
            hours = select_hours(choice, ctx)
            schedule = optimize(ctx, hours, day_fleet, obj_cfg)
            outcome = evaluate_day(schedule, ctx.actual_load, ctx.temperature, day_fleet, obj_cfg.dt)
            mitigated = np.array(outcome.mitigated.values)
            costs = outcome.costs
            spill = outcome.spill
        else:
            spill = np.zeros(0)
        n = min(len(carry), HOURS_PER_DAY)
        mitigated[:n] += carry[:n]
        carry = spill
        ledger = update_ledger(ledger, HourlyProfile(mitigated, ctx.date), ctx.actual_load, costs)
        if keep_days:
            records.append(DayRecord(ctx.date, schedule is not None, schedule,
                                     np.asarray(ctx.forecast), np.asarray(ctx.actual), mitigated))
    months.append(_month_result(ledger, tariff))
    return AnnualReport(label or choice.kind.value, tuple(months), tuple(records))


@dataclass(frozen=True, eq=False)
class StrategyComparison:
    reports: dict                # Strategy -> AnnualReport
    normalized: dict             # Strategy -> float
    monthly: dict                # Strategy -> {month: savings}
    marks: dict                  # Strategy -> {month: bool}
    flags: tuple = ()


def normalize(savings: dict):
    best = max(savings.values()) if savings else 0.0
    if best <= 0:
        return {k: 0.0 for k in savings}, ("no positive savings: normalized values set to 0",)
    return {k: v / best for k, v in savings.items()}, ()


def compare_strategies(days, fleet: ResourceFleet, tariff: Tariff = Tariff(), x: int = 2,
                       append_payback_hour: bool = False, gate_cfg: GateConfig = GateConfig(),
                       obj_cfg: ObjectiveConfig = ObjectiveConfig(), tcl_months=SUMMER_DR_MONTHS,
                       similar_within: float = 0.02) -> StrategyComparison:
    """Simulate S1-S5 and mark each month's best strategy (plus any within ``similar_within``)."""
    reports = {}
    for s in Strategy:
        choice = StrategyChoice(s, x, append_payback_hour and s.horizonal)
        reports[s] = simulate_year(days, fleet, choice, tariff, gate_cfg, obj_cfg, tcl_months,
                                   keep_days=False)
    normalized, flags = normalize({s: r.savings for s, r in reports.items()})
    monthly = {s: r.monthly_savings() for s, r in reports.items()}
    months = sorted({m for d in monthly.values() for m in d})
    marks = {s: {} for s in Strategy}
    for m in months:
        vals = {s: monthly[s].get(m, 0.0) for s in Strategy}
        top = max(vals.values())
        for s, v in vals.items():
            marks[s][m] = top > 0 and v >= top - similar_within * abs(top)
    return StrategyComparison(reports, normalized, monthly, marks, flags)


@dataclass(frozen=True)
class SweepRow:
    rating_mw: float
    savings: float
    marginal_per_mw: float
    battery_cycles: float

    @property
    def savings_per_cycle(self) -> float:
        return self.savings / self.battery_cycles if self.battery_cycles > 0 else 0.0


def single_resource_fleet(resource: str, rating: float, duration_hours: float = 2.0,
                          template: ResourceFleet = None) -> ResourceFleet:
    template = template or ResourceFleet.default()
    if rating <= 0:
        return ResourceFleet()
    if resource == "bess":
        base = template.bess or BessSpec(power_max=1.0, energy_max=duration_hours)
        spec = BessSpec(power_max=rating, energy_max=rating * duration_hours,
                        energy_min=0.0, discharge_efficiency=base.discharge_efficiency)
        return ResourceFleet(bess=spec)
    if resource == "dg":
        base = template.dg or DgSpec(power_max=0.0)
        return ResourceFleet(dg=replace(base, power_max=rating))
    raise ValueError(f"resource must be 'bess' or 'dg', got {resource!r}")


def _sweep_point(args):
    days, fleet, choice, tariff, gate_cfg, obj_cfg = args
    r = simulate_year(days, fleet, choice, tariff, gate_cfg, obj_cfg, keep_days=False)
    return r.savings, r.battery_cycles


def sensitivity_sweep(days, resource: str, ratings, choice: StrategyChoice = StrategyChoice(),
                      tariff: Tariff = Tariff(), gate_cfg: GateConfig = GateConfig(),
                      obj_cfg: ObjectiveConfig = ObjectiveConfig(), duration_hours: float = 2.0,
                      template: ResourceFleet = None, workers: int = 1) -> list:
    """Annual savings per rating of a single BESS or DG, with marginal savings per MW."""
    ratings = [float(r) for r in ratings]
    if any(b <= a for a, b in zip(ratings, ratings[1:])):
        raise ValueError("ratings must be strictly increasing")
    days = tuple(getattr(days, "days", days))
    jobs = [(days, single_resource_fleet(resource, r, duration_hours, template), choice, tariff,
             gate_cfg, obj_cfg) for r in ratings]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    rows = []
    prev_rating, prev_savings = 0.0, 0.0
    for rating, (savings, cycles) in zip(ratings, results):
        step = rating - prev_rating
        marginal = (savings - prev_savings) / step if step > 0 else 0.0
        rows.append(SweepRow(rating, savings, marginal, cycles))
        prev_rating, prev_savings = rating, savings
    return rows
