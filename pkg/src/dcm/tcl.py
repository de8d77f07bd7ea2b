"""Aggregate HVAC demand-response groups with energy-conserving payback.

HVAC consumption follows a linear duty-cycle curve between a balance and a design
temperature. Deferred energy from a DR run is paid back right after the run,
limited each hour by the fleet headroom ``(1 - duty) * capacity``.

Profiles are indexed by clock hour starting at midnight and may run past hour 23
when payback has not finished by the end of the day; callers carry that tail
into the next day.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import HOURS_PER_DAY, OptionMatrix, TargetHourSet, embed, runs
from .cvr import enumerate_options, pattern_ok

CYCLING = "cycling_10in30"
FULL_OFF = "full_off"
CYCLING_ON_FRACTION = 2.0 / 3.0  # 10 minutes off in every 30
# overnight headroom floor used once payback spills past midnight
SPILL_HEADROOM_FLOOR = 0.5


@dataclass(frozen=True)
class TclGroupSpec:
    group_kind: str = CYCLING
    unit_count: int = 30_000
    rated_power: float = 5.0  # kW per unit
    scale_factor: float = 1.0
    max_consecutive_hours: Optional[int] = None
    balance_temp: float = 18.0
    design_temp: float = 40.0
    payback_recovery_fraction: float = 1.0
    payback_enabled: bool = True

    def __post_init__(self):
        if self.group_kind not in (CYCLING, FULL_OFF):
            raise ValueError(f"unknown group kind {self.group_kind!r}")
        if self.unit_count <= 0 or self.rated_power <= 0:
            raise ValueError("unit_count and rated_power must be positive")
        if not self.balance_temp < self.design_temp:
            raise ValueError("balance_temp must be below design_temp")
        if not 0.9 <= self.payback_recovery_fraction <= 1.1:
            raise ValueError("payback_recovery_fraction must lie in [0.9, 1.1]")
        if self.max_consecutive_hours is None and self.group_kind == FULL_OFF:
            object.__setattr__(self, "max_consecutive_hours", 2)

    @property
    def run_limit(self) -> float:
        return math.inf if self.max_consecutive_hours is None else self.max_consecutive_hours

    @property
    def capacity_mw(self) -> float:
        return self.unit_count * self.rated_power * self.scale_factor / 1000.0

    def scaled(self, factor: float) -> "TclGroupSpec":
        from dataclasses import replace
        return replace(self, unit_count=int(round(self.unit_count * factor)))


@dataclass(frozen=True, eq=False)
class TclOptionSet:
    """Deployment options of one group plus their MW deltas.

    ``reduction`` has one row per clock hour from midnight (at least 24 rows) and one
    column per option; positive entries are shed load, negative entries payback.
    """

    deployment: OptionMatrix
    reduction: np.ndarray
    spec: TclGroupSpec

    @property
    def n_options(self) -> int:
        return self.deployment.n_options

    def over(self, hours) -> np.ndarray:
        """Reduction rows for the given clock hours (hours x options)."""
        return self.reduction[list(hours), :]


def duty_cycle(temp, spec: TclGroupSpec):
    d = (np.asarray(temp, dtype=float) - spec.balance_temp) / (spec.design_temp - spec.balance_temp)
    return np.clip(d, 0.0, 1.0)


def hvac_normal_profile(temperature, spec: TclGroupSpec) -> np.ndarray:
    temp = getattr(temperature, "values", temperature)
    return duty_cycle(temp, spec) * spec.capacity_mw


def _shed(duty, spec: TclGroupSpec):
    if spec.group_kind == CYCLING:
        return np.maximum(0.0, duty - CYCLING_ON_FRACTION) * spec.capacity_mw
    return duty * spec.capacity_mw


def dr_profile(column, hours, temperature, spec: TclGroupSpec) -> np.ndarray:
    """MW delta of one deployment column on the clock (shed positive, payback negative)."""
    hours = hours.deployable if isinstance(hours, TargetHourSet) else tuple(hours)
    temp = np.asarray(getattr(temperature, "values", temperature), dtype=float)
    on = embed(hours, np.asarray(column, dtype=np.int8)).astype(bool)
    if not pattern_ok(on, spec.run_limit):
        raise ValueError(f"deployment {list(column)} breaks the {spec.run_limit}-hour run limit")
    duty = duty_cycle(temp, spec)
    cap = spec.capacity_mw
    shed = np.where(on, _shed(duty, spec), 0.0)

    delta = list(shed)
    kappa = spec.payback_recovery_fraction
    spill_headroom = max(1.0 - duty[-1], SPILL_HEADROOM_FLOOR) * cap
    for start, end in runs(on):
        remaining = kappa * float(shed[start:end + 1].sum())
        if not spec.payback_enabled:
            continue
        # rounding scraps of the owed energy are settled in the current hour
        scrap = 1e-12 * remaining
        h = end + 1
        while remaining > 0.0:
            if h >= len(delta):
                delta.append(0.0)
            if h < HOURS_PER_DAY:
                # payback never lands on an hour where the group is held off
                room = 0.0 if on[h] else (1.0 - duty[h]) * cap
            else:
                room = spill_headroom
            # headroom is shared with paybacks of earlier runs
            room = max(0.0, room + min(0.0, delta[h]))
            take = remaining if remaining - room <= scrap else room
            if take > 0.0:
                delta[h] -= take
                remaining = 0.0 if take == remaining else remaining - take
            h += 1
    return np.array(delta)


def build_tcl_options(hours: TargetHourSet, temperature, spec: TclGroupSpec) -> TclOptionSet:
    deploy = hours.deployable if isinstance(hours, TargetHourSet) else tuple(hours)
    cols = enumerate_options(deploy, spec.run_limit)
    profiles = [dr_profile(cols[:, j], deploy, temperature, spec) for j in range(cols.shape[1])]
    reduction = _stack(profiles)
    deployment = OptionMatrix(deploy, cols, payback_columns=reduction)
    return TclOptionSet(deployment, deployment.payback_columns, spec)


def _stack(profiles) -> np.ndarray:
    n = max([HOURS_PER_DAY] + [len(p) for p in profiles])
    out = np.zeros((n, len(profiles)))
    for j, p in enumerate(profiles):
        out[:len(p), j] = p
    return out


def total_tcl_reduction(profiles) -> np.ndarray:
    """Elementwise sum of per-group deltas; shorter profiles are zero-padded."""
    profiles = list(profiles)
    if not profiles:
        return np.zeros(HOURS_PER_DAY)
    return _stack(profiles).sum(axis=1)


def tcl_dr_hour_count(columns) -> int:
    return int(sum(int(np.sum(c)) for c in columns))


def shed_energy(delta) -> float:
    d = np.asarray(delta)
    return float(d[d > 0].sum())


def payback_energy(delta) -> float:
    d = np.asarray(delta)
    return float(-d[d < 0].sum())
