"""Execution gate, targeted-hour selection strategies and the monthly peak ledger."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction

import numpy as np

from .core import HOURS_PER_DAY, DayContext, HourlyProfile, TargetHourSet, top_x_hours


class Strategy(str, Enum):
    S1 = "s1"  # Prob-TopX
    S2 = "s2"  # DALF-TopX
    S3 = "s3"  # Prob-Horizon
    S4 = "s4"  # DALF-Horizon
    S5 = "s5"  # CombinedHorizon

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def horizonal(self) -> bool:
        return self in (Strategy.S3, Strategy.S4, Strategy.S5)

    @classmethod
    def parse(cls, text) -> "Strategy":
        if isinstance(text, Strategy):
            return text
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise ValueError(f"unknown strategy {text!r}; expected one of s1..s5") from None


_LABELS = {
    Strategy.S1: "Prob-TopX",
    Strategy.S2: "DALF-TopX",
    Strategy.S3: "Prob-Horizon",
    Strategy.S4: "DALF-Horizon",
    Strategy.S5: "CombinedHorizon",
}


@dataclass(frozen=True)
class GateConfig:
    error_margin: float = 0.10
    peak_day_prob_threshold: float = 0.5

    def __post_init__(self):
        if self.error_margin < 0:
            raise ValueError("error_margin must be >= 0")
        if not 0 <= self.peak_day_prob_threshold <= 1:
            raise ValueError("peak_day_prob_threshold must lie in [0, 1]")


@dataclass(frozen=True)
class StrategyChoice:
    kind: Strategy = Strategy.S1
    x: int = 2
    append_payback_hour: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", Strategy.parse(self.kind))
        if self.x < 1:
            raise ValueError("x must be >= 1")
        if self.append_payback_hour and not self.kind.horizonal:
            raise ValueError("append_payback_hour applies to horizon strategies (s3-s5) only")


@dataclass(frozen=True)
class MonthLedger:
    month: tuple  # (year, month)
    historical_peak_mw: float = 0.0
    baseline_peak_mw: float = 0.0
    operating_cost_dollars: float = 0.0
    dr_hours: int = 0
    battery_cycles: float = 0.0
    discharged_mwh: float = 0.0
    dispatch_days: int = 0
    payback_shift_hours: int = 0


@dataclass(frozen=True)
class DayCosts:
    operating_cost: float = 0.0
    dr_hours: int = 0
    battery_cycles: float = 0.0
    discharged_mwh: float = 0.0
    dispatched: bool = False


def gate(ctx: DayContext, ledger: MonthLedger, cfg: GateConfig) -> bool:
    """True when coordinated mitigation should run today."""
    forecast_peak = float(np.max(ctx.forecast))
    # the margin is read as the decimal the user wrote, so 100 * (1 + 0.10) == 110 exactly
    margin = Fraction(repr(float(cfg.error_margin)))
    if not Fraction(forecast_peak) * (1 + margin) > Fraction(float(ledger.historical_peak_mw)):
        return False
    return ctx.peak_day_probability >= cfg.peak_day_prob_threshold


def _span(hours) -> tuple:
    return tuple(range(min(hours), max(hours) + 1))


def select_hours(choice: StrategyChoice, ctx: DayContext) -> TargetHourSet:
    kind = choice.kind
    by_prob = top_x_hours(ctx.peak_hour_probabilities, choice.x)
    by_load = top_x_hours(ctx.forecast, choice.x)
    if kind is Strategy.S1:
        return by_prob
    if kind is Strategy.S2:
        return by_load
    if kind is Strategy.S3:
        span = _span(by_prob.hours)
    elif kind is Strategy.S4:
        span = _span(by_load.hours)
    else:
        span = _span(by_prob.hours + by_load.hours)
    if not choice.append_payback_hour:
        return TargetHourSet(span, horizonal=True)
    extra = span[-1] + 1
    if extra >= HOURS_PER_DAY:
        return TargetHourSet(span, horizonal=True, payback_hour_appended=True, payback_clipped=True)
    return TargetHourSet(span + (extra,), horizonal=True, payback_hour_appended=True,
                         payback_hour=extra)


def new_ledger(month) -> MonthLedger:
    return MonthLedger(month=tuple(month))


def update_ledger(ledger, mitigated_day: HourlyProfile, baseline_day: HourlyProfile,
                  day_costs: DayCosts = DayCosts()) -> MonthLedger:
    """Fold one day into the running month record; a new month starts a fresh ledger."""
    month = (mitigated_day.start.year, mitigated_day.start.month)
    if ledger is None or ledger.month != month:
        ledger = new_ledger(month)
    mitigated = np.asarray(mitigated_day.values)
    baseline = np.asarray(baseline_day.values)
    shifted = int(np.sum(mitigated > baseline + 1e-9))
    return replace(
        ledger,
        historical_peak_mw=max(ledger.historical_peak_mw, float(mitigated.max())),
        baseline_peak_mw=max(ledger.baseline_peak_mw, float(baseline.max())),
        operating_cost_dollars=ledger.operating_cost_dollars + day_costs.operating_cost,
        dr_hours=ledger.dr_hours + day_costs.dr_hours,
        battery_cycles=ledger.battery_cycles + day_costs.battery_cycles,
        discharged_mwh=ledger.discharged_mwh + day_costs.discharged_mwh,
        dispatch_days=ledger.dispatch_days + int(day_costs.dispatched),
        payback_shift_hours=ledger.payback_shift_hours + shifted,
    )
