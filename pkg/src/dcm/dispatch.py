"""Coordinated day-ahead dispatch of BESS, DG, CVR and TCL groups.

One option is chosen per categorical resource (CVR, each TCL group); for every
combination of options the continuous battery/DG sub-problem is solved exactly
(:mod:`dcm.minmax`). Combinations are enumerated in lexicographic order and the
first best one wins, so ties resolve to the lowest combination index. Above the
enumeration budget a depth-first branch and bound prunes subtrees using a
relaxation in which every undecided resource contributes its per-hour maximum
reduction at no penalty.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import minmax
from .core import HOURS_PER_DAY, DayContext, HourlyProfile, TargetHourSet, embed
from .cvr import CvrSpec, apply_cvr_option, build_cvr_options, cvr_reduction
from .resources import BessSpec, DgSpec, bess_trajectory, dg_cost
from .strategy import DayCosts, Strategy
from .tcl import TclGroupSpec, build_tcl_options, dr_profile, tcl_dr_hour_count

log = logging.getLogger(__name__)

F1 = "f1"
F2 = "f2"


class DispatchSpaceTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class ResourceFleet:
    bess: Optional[BessSpec] = None
    dg: Optional[DgSpec] = None
    cvr: Optional[CvrSpec] = None
    tcl: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tcl", tuple(self.tcl))

    @classmethod
    def default(cls) -> "ResourceFleet":
        """40 MW DG, 10 MW / 2 h BESS, CVR and two 30,000-unit HVAC groups."""
        return cls(
            bess=BessSpec(power_max=10.0, energy_max=20.0),
            dg=DgSpec(power_max=40.0),
            cvr=CvrSpec(),
            tcl=(TclGroupSpec(group_kind="cycling_10in30"), TclGroupSpec(group_kind="full_off")),
        )

    def without_tcl(self) -> "ResourceFleet":
        return replace(self, tcl=())

    def with_tcl_scaled(self, factor: float) -> "ResourceFleet":
        return replace(self, tcl=tuple(g.scaled(factor) for g in self.tcl))

    @property
    def empty(self) -> bool:
        return self.bess is None and self.dg is None and self.cvr is None and not self.tcl


@dataclass(frozen=True)
class ObjectiveConfig:
    beta: float = 20_000.0            # $ per MW of peak reduction
    tcl_hour_penalty: float = 500.0   # $ per group-hour of HVAC curtailment
    kind: Optional[str] = None        # None picks f1 for s1 and f2 otherwise
    beta_f1: Optional[float] = None
    beta_f2: Optional[float] = None
    enumeration_budget: int = 100_000
    max_combinations: int = 50_000_000
    dt: float = 1.0

    def __post_init__(self):
        if self.beta < 0 or self.tcl_hour_penalty < 0:
            raise ValueError("beta and tcl_hour_penalty must be >= 0")
        if self.kind not in (None, F1, F2):
            raise ValueError(f"objective kind must be f1 or f2, got {self.kind!r}")

    def for_strategy(self, strategy) -> "ObjectiveConfig":
        if self.kind is not None:
            return self
        return replace(self, kind=F1 if Strategy.parse(strategy) is Strategy.S1 else F2)

    def weight(self, kind: str) -> float:
        override = self.beta_f1 if kind == F1 else self.beta_f2
        return self.beta if override is None else override


@dataclass(frozen=True, eq=False)
class DispatchSchedule:
    hours: TargetHourSet
    kind: str
    bess_mw: np.ndarray
    dg_mw: np.ndarray
    cvr_option: Optional[int]
    cvr_column: Optional[np.ndarray]
    tcl_options: tuple
    tcl_columns: tuple
    cvr_mw: np.ndarray           # forecast-based CVR reduction over the hour set
    tcl_mw: np.ndarray           # TCL delta over the hour set (payback negative)
    tcl_day: np.ndarray          # TCL delta on the clock, may run past hour 23
    predicted_residual: np.ndarray
    predicted_day: np.ndarray    # forecast minus every planned delta, 24 values
    predicted_peak_mw: float
    objective_value: float
    combinations: int = 1
    flags: tuple = ()

    @property
    def dr_hours(self) -> int:
        return tcl_dr_hour_count(self.tcl_columns)

    @property
    def reduction_mw(self) -> np.ndarray:
        return self.bess_mw + self.dg_mw + self.cvr_mw + self.tcl_mw


def _hour_weights(ctx: DayContext, hours: TargetHourSet):
    p = np.asarray(ctx.peak_hour_probabilities)[list(hours.hours)]
    total = p.sum()
    if total <= 0:
        return np.full(len(hours), 1.0 / len(hours)), ("uniform-weights",)
    return p / total, ()


def _operating_cost(schedule: DispatchSchedule, cfg: ObjectiveConfig, fleet) -> float:
    cost = 0.0
    if schedule.dg_mw.any():
        dg = fleet.dg if fleet is not None and fleet.dg is not None else DgSpec(power_max=math.inf)
        cost += dg_cost(schedule.dg_mw, dg, cfg.dt)
    return cost + cfg.tcl_hour_penalty * schedule.dr_hours


def _reductions(schedule: DispatchSchedule) -> np.ndarray:
    return schedule.bess_mw + schedule.dg_mw + schedule.cvr_mw + schedule.tcl_mw


def objective_f1(schedule: DispatchSchedule, ctx: DayContext, cfg: ObjectiveConfig,
                 fleet: ResourceFleet = None) -> float:
    """Probability-weighted reduction value minus DG and HVAC curtailment costs."""
    if len(schedule.hours) == 0:
        return 0.0
    mu, _ = _hour_weights(ctx, schedule.hours)
    value = cfg.weight(F1) * float(mu @ _reductions(schedule))
    return value - _operating_cost(schedule, cfg, fleet)


def objective_f2(schedule: DispatchSchedule, ctx: DayContext, cfg: ObjectiveConfig,
                 fleet: ResourceFleet = None) -> float:
    """Value of the expected peak reduction over the hour set minus operating costs."""
    if len(schedule.hours) == 0:
        return 0.0
    forecast = np.asarray(ctx.forecast)[list(schedule.hours.hours)]
    residual = forecast - _reductions(schedule)
    peak_reduction = float(forecast.max() - residual.max())
    return cfg.weight(F2) * peak_reduction - _operating_cost(schedule, cfg, fleet)


@dataclass
class _Categorical:
    name: str
    columns: np.ndarray   # deployable hours x options
    over_hours: np.ndarray  # hour set x options, MW reduction
    penalty: np.ndarray   # per option
    day: Optional[np.ndarray] = None  # clock x options, TCL only

    @property
    def n(self) -> int:
        return self.columns.shape[1]


def _categoricals(ctx, hours, fleet, cfg) -> list:
    out = []
    targeted = list(hours.hours)
    if not hours.deployable:
        return out
    if fleet.cvr is not None:
        opts = build_cvr_options(hours, fleet.cvr)
        red = np.zeros((len(targeted), opts.n_options))
        rows = [targeted.index(h) for h in opts.hours]
        for j in range(opts.n_options):
            red[rows, j] = apply_cvr_option(opts.column(j), ctx.forecast, opts.hours, fleet.cvr)
        out.append(_Categorical("cvr", opts.columns, red, np.zeros(opts.n_options)))
    for i, spec in enumerate(fleet.tcl):
        opts = build_tcl_options(hours, ctx.temperature, spec)
        pen = cfg.tcl_hour_penalty * opts.deployment.columns.sum(axis=0).astype(float)
        out.append(_Categorical(f"tcl{i + 1}", opts.deployment.columns, opts.over(targeted),
                                pen, opts.reduction))
    return out


class _Evaluator:
    """Scores batches of option combinations given their summed reductions and penalties."""

    def __init__(self, ctx, hours, fleet, cfg):
        self.kind = cfg.kind
        self.beta = cfg.weight(cfg.kind)
        self.forecast = np.asarray(ctx.forecast)[list(hours.hours)]
        bess, dg = fleet.bess, fleet.dg
        self.Pb = bess.power_max if bess else 0.0
        self.B = bess.discharge_efficiency * bess.usable_energy / cfg.dt if bess else 0.0
        self.Pg = dg.power_max if dg else 0.0
        self.cost = dg.net_cost_per_mwh * cfg.dt if dg else 0.0
        self.flags = ()
        if self.kind == F1:
            self.mu, self.flags = _hour_weights(ctx, hours)
            b, g = minmax.weighted_allocation(self.mu, self.Pb, self.B, self.Pg, self.cost, self.beta)
            self.b1, self.g1 = b, g
            self.continuous = self.beta * float(self.mu @ (b + g)) - self.cost * float(g.sum())

    def scores(self, red: np.ndarray, pen: np.ndarray) -> np.ndarray:
        """``red`` is (combos x hours)."""
        if self.kind == F1:
            return self.beta * (red @ self.mu) - pen + self.continuous
        R = self.forecast[None, :] - red
        p, G, _ = minmax.solve_levels(R, self.Pb, self.B, self.Pg, self.cost, self.beta)
        return self.beta * (self.forecast.max() - p) - self.cost * G - pen

    def continuous_for(self, red_row: np.ndarray):
        if self.kind == F1:
            return self.b1.copy(), self.g1.copy()
        R = self.forecast - red_row
        p, _, _ = minmax.solve_levels(R[None, :], self.Pb, self.B, self.Pg, self.cost, self.beta)
        return minmax.allocate(R, float(p[0]), self.Pb, self.B, self.Pg)


def _grid(cats, k):
    """All combinations of the given categoricals in lexicographic order."""
    idx = np.indices([c.n for c in cats]).reshape(len(cats), -1) if cats else np.zeros((0, 1), int)
    red = np.zeros((idx.shape[1], k))
    pen = np.zeros(idx.shape[1])
    for c, j in zip(cats, idx):
        red += c.over_hours[:, j].T
        pen += c.penalty[j]
    return idx, red, pen


def _search(cats, evaluator, k, budget):
    """Index tuple of the best combination (lowest lexicographic index among ties)."""
    sizes = [c.n for c in cats]
    strides = [int(np.prod(sizes[i + 1:], dtype=np.int64)) for i in range(len(sizes))]
    relaxed = [c.over_hours.max(axis=1) for c in cats]
    best = {"score": -np.inf, "code": None, "idx": None}

    def consider(score, idx_tuple):
        code = sum(i * s for i, s in zip(idx_tuple, strides))
        if score > best["score"] or (score == best["score"] and code < best["code"]):
            best.update(score=score, code=code, idx=idx_tuple)

    def visit(depth, prefix, red, pen):
        rest = cats[depth:]
        if int(np.prod([c.n for c in rest], dtype=np.int64)) <= budget:
            idx, r, p = _grid(rest, k)
            s = evaluator.scores(red[None, :] + r, pen + p)
            j = int(np.argmax(s))
            consider(float(s[j]), prefix + tuple(int(v) for v in idx[:, j]))
            return
        cat = cats[depth]
        tail = np.sum(relaxed[depth + 1:], axis=0) if depth + 1 < len(cats) else np.zeros(k)
        bounds = evaluator.scores(red[None, :] + cat.over_hours.T + tail[None, :], pen + cat.penalty)
        for j in range(cat.n):
            slack = 1e-9 * max(1.0, abs(best["score"])) if np.isfinite(best["score"]) else 0.0
            if bounds[j] < best["score"] - slack:
                continue
            visit(depth + 1, prefix + (j,), red + cat.over_hours[:, j], pen + cat.penalty[j])

    visit(0, (), np.zeros(k), 0.0)
    return best["idx"], best["score"]


def optimize(ctx: DayContext, hours: TargetHourSet, fleet: ResourceFleet,
             cfg: ObjectiveConfig = ObjectiveConfig()) -> DispatchSchedule:
    if cfg.kind is None:
        cfg = replace(cfg, kind=F2 if hours.horizonal else F1)
    k = len(hours)
    cats = _categoricals(ctx, hours, fleet, cfg)
    total = int(np.prod([c.n for c in cats], dtype=np.int64)) if cats else 1
    if total > cfg.max_combinations:
        raise DispatchSpaceTooLarge(
            f"{total} option combinations over {k} hours exceed the limit of "
            f"{cfg.max_combinations}; reduce the targeted horizon (smaller x) or drop resources")
    ev = _Evaluator(ctx, hours, fleet, cfg)
    if total <= cfg.enumeration_budget:
        idx, red, pen = _grid(cats, k)
        s = ev.scores(red, pen)
        j = int(np.argmax(s))
        choice, score = tuple(int(v) for v in idx[:, j]), float(s[j])
    else:
        choice, score = _search(cats, ev, k, cfg.enumeration_budget)
    return _assemble(ctx, hours, cats, choice, ev, cfg, fleet, total, score)


def _assemble(ctx, hours, cats, choice, ev, cfg, fleet, total, score):
    k = len(hours)
    by_name = dict(zip([c.name for c in cats], zip(cats, choice)))
    cvr_mw = np.zeros(k)
    cvr_option = cvr_column = None
    if "cvr" in by_name:
        c, j = by_name["cvr"]
        cvr_option, cvr_column, cvr_mw = j, c.columns[:, j].copy(), c.over_hours[:, j].copy()
    tcl_options, tcl_columns = [], []
    tcl_mw = np.zeros(k)
    tcl_day = np.zeros(HOURS_PER_DAY)
    for i in range(len(fleet.tcl)):
        c, j = by_name[f"tcl{i + 1}"] if f"tcl{i + 1}" in by_name else (None, None)
        if c is None:
            continue
        tcl_options.append(j)
        tcl_columns.append(c.columns[:, j].copy())
        tcl_mw += c.over_hours[:, j]
        col = c.day[:, j]
        if len(col) > len(tcl_day):
            tcl_day = np.pad(tcl_day, (0, len(col) - len(tcl_day)))
        tcl_day[:len(col)] += col
    b, g = ev.continuous_for(cvr_mw + tcl_mw)
    forecast = np.asarray(ctx.forecast, dtype=float)
    residual = forecast[list(hours.hours)] - b - g - cvr_mw - tcl_mw
    day = forecast - tcl_day[:HOURS_PER_DAY]
    if k:
        day[list(hours.hours)] -= b + g + cvr_mw
    schedule = DispatchSchedule(
        hours=hours, kind=cfg.kind, bess_mw=b, dg_mw=g,
        cvr_option=cvr_option, cvr_column=cvr_column,
        tcl_options=tuple(tcl_options), tcl_columns=tuple(tcl_columns),
        cvr_mw=cvr_mw, tcl_mw=tcl_mw, tcl_day=tcl_day,
        predicted_residual=residual, predicted_day=day,
        predicted_peak_mw=float(residual.max()) if k else float(forecast.max()),
        objective_value=0.0, combinations=total, flags=tuple(ev.flags),
    )
    evaluate = objective_f1 if cfg.kind == F1 else objective_f2
    value = evaluate(schedule, ctx, cfg, fleet)
    if k and abs(value - score) > 1e-6 * max(1.0, abs(value)):
        log.warning("objective mismatch: search %.6f vs evaluated %.6f", score, value)
    return replace(schedule, objective_value=value)


@dataclass(frozen=True, eq=False)
class DayOutcome:
    mitigated: HourlyProfile
    spill: np.ndarray  # extra load (MW) carried into the next day's first hours
    costs: DayCosts


def evaluate_day(schedule: DispatchSchedule, actual_day: HourlyProfile, temperature,
                 fleet: ResourceFleet, dt: float = 1.0) -> DayOutcome:
    """Apply a committed schedule to the actual load and temperature of the day."""
    actual = np.asarray(actual_day.values, dtype=float)
    mitigated = actual.copy()
    targeted = list(schedule.hours.hours)
    if targeted:
        mitigated[targeted] -= schedule.bess_mw + schedule.dg_mw
    if schedule.cvr_column is not None and fleet.cvr is not None:
        mitigated[list(schedule.hours.deployable)] -= apply_cvr_option(
            schedule.cvr_column, actual, schedule.hours, fleet.cvr)
    spill = np.zeros(0)
    for col, spec in zip(schedule.tcl_columns, fleet.tcl):
        delta = dr_profile(col, schedule.hours, temperature, spec)
        mitigated -= delta[:HOURS_PER_DAY]
        tail = -delta[HOURS_PER_DAY:]
        if len(tail) > len(spill):
            spill = np.pad(spill, (0, len(tail) - len(spill)))
        spill[:len(tail)] += tail
    discharged = cycles = 0.0
    if fleet.bess is not None and schedule.bess_mw.any():
        bess_trajectory(schedule.bess_mw, fleet.bess, dt)  # raises if infeasible
        drawn = float(schedule.bess_mw.sum()) * dt / fleet.bess.discharge_efficiency
        discharged, cycles = drawn, drawn / fleet.bess.usable_energy
    op = dg_cost(schedule.dg_mw, fleet.dg, dt) if fleet.dg is not None else 0.0
    costs = DayCosts(operating_cost=op, dr_hours=schedule.dr_hours, battery_cycles=cycles,
                     discharged_mwh=discharged, dispatched=True)
    return DayOutcome(HourlyProfile(mitigated, actual_day.start), spill, costs)


def evaluate_on_actual(schedule: DispatchSchedule, actual_day: HourlyProfile, temperature,
                       fleet: ResourceFleet) -> HourlyProfile:
    return evaluate_day(schedule, actual_day, temperature, fleet).mitigated


def idle_schedule(ctx: DayContext, kind: str = F2) -> DispatchSchedule:
    """Do-nothing schedule over an empty hour set (used for skipped days)."""
    empty = np.zeros(0)
    forecast = np.asarray(ctx.forecast, dtype=float)
    return DispatchSchedule(
        hours=TargetHourSet(()), kind=kind, bess_mw=empty, dg_mw=empty, cvr_option=None,
        cvr_column=None, tcl_options=(), tcl_columns=(), cvr_mw=empty, tcl_mw=empty,
        tcl_day=np.zeros(HOURS_PER_DAY), predicted_residual=empty, predicted_day=forecast.copy(),
        predicted_peak_mw=float(forecast.max()), objective_value=0.0)
