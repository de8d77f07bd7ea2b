"""Shared value types: hourly profiles, targeted hour sets, day contexts and option matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from typing import Optional, Sequence

import numpy as np

HOURS_PER_DAY = 24


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HourlyProfile:
    """Hourly series (MW or degC) starting at ``start``; resolution is fixed at one hour."""

    values: np.ndarray
    start: datetime

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values).ravel())
        start = self.start
        if isinstance(start, date) and not isinstance(start, datetime):
            start = datetime(start.year, start.month, start.day)
        object.__setattr__(self, "start", start.replace(minute=0, second=0, microsecond=0))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, idx):
        return self.values[idx]

    @property
    def n_days(self) -> int:
        return math.ceil(len(self) / HOURS_PER_DAY)

    def timestamp(self, hour: int) -> datetime:
        return self.start + timedelta(hours=int(hour))

    def at(self, day: int, hour: int) -> float:
        if not 0 <= hour < HOURS_PER_DAY:
            raise IndexError(f"hour-of-day {hour} outside 0..23")
        return float(self.values[day * HOURS_PER_DAY + hour])

    def day(self, day: int) -> "HourlyProfile":
        lo = day * HOURS_PER_DAY
        if lo < 0 or lo >= len(self):
            raise IndexError(f"day {day} outside profile")
        return HourlyProfile(self.values[lo:lo + HOURS_PER_DAY], self.timestamp(lo))

    def equals(self, other: "HourlyProfile") -> bool:
        return self.start == other.start and np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class TargetHourSet:
    """Sorted hour-of-day indices targeted for demand reduction.

    ``payback_hour`` is the hour appended after a horizon to absorb TCL payback. It is
    ``None`` when nothing was appended, including the case where the span already
    ends at hour 23 (``payback_clipped`` is then set).
    """

    hours: tuple
    horizonal: bool = False
    payback_hour_appended: bool = False
    payback_hour: Optional[int] = None
    payback_clipped: bool = False

    def __post_init__(self):
        hrs = tuple(int(h) for h in self.hours)
        if len(set(hrs)) != len(hrs):
            raise ValueError(f"duplicate hours in {hrs}")
        if list(hrs) != sorted(hrs):
            raise ValueError(f"hours must be ascending: {hrs}")
        if any(h < 0 or h >= HOURS_PER_DAY for h in hrs):
            raise ValueError(f"hours must lie in 0..23: {hrs}")
        if self.horizonal and hrs and hrs[-1] - hrs[0] != len(hrs) - 1:
            raise ValueError(f"horizon hours must be consecutive: {hrs}")
        if self.payback_hour is not None and self.payback_hour not in hrs:
            raise ValueError("payback hour must be part of the hour set")
        object.__setattr__(self, "hours", hrs)

    def __len__(self) -> int:
        return len(self.hours)

    def __iter__(self):
        return iter(self.hours)

    def __contains__(self, hour) -> bool:
        return hour in self.hours

    @property
    def deployable(self) -> tuple:
        """Hours where categorical resources (CVR, TCL) may be switched on."""
        return tuple(h for h in self.hours if h != self.payback_hour)

    def mask(self) -> np.ndarray:
        m = np.zeros(HOURS_PER_DAY, dtype=bool)
        m[list(self.hours)] = True
        return m


@dataclass(frozen=True, eq=False)
class DayContext:
    date: date
    forecast_load: HourlyProfile
    actual_load: HourlyProfile
    temperature: HourlyProfile
    peak_day_probability: float
    peak_hour_probabilities: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "peak_hour_probabilities",
                           _frozen(self.peak_hour_probabilities).ravel())

    @property
    def forecast(self) -> np.ndarray:
        return self.forecast_load.values

    @property
    def actual(self) -> np.ndarray:
        return self.actual_load.values

    @property
    def temp(self) -> np.ndarray:
        return self.temperature.values


@dataclass(frozen=True, eq=False)
class OptionMatrix:
    """Binary deployment options (rows = deployable hours, columns = options).

    ``payback_columns`` optionally carries per-option MW deltas for TCL groups,
    indexed by clock hour (see :mod:`dcm.tcl`).
    """

    hours: tuple
    columns: np.ndarray
    payback_columns: Optional[np.ndarray] = None

    def __post_init__(self):
        cols = np.array(self.columns, dtype=np.int8)
        if cols.ndim == 1:
            cols = cols.reshape(len(self.hours), -1)
        if cols.shape[0] != len(self.hours):
            raise ValueError(f"column length {cols.shape[0]} != number of hours {len(self.hours)}")
        if not np.isin(cols, (0, 1)).all():
            raise ValueError("option columns must be binary")
        if len({c.tobytes() for c in cols.T}) != cols.shape[1]:
            raise ValueError("option columns must be distinct")
        if int((cols.sum(axis=0) == 0).sum()) != 1:
            raise ValueError("exactly one all-zero option is required")
        cols.setflags(write=False)
        object.__setattr__(self, "hours", tuple(int(h) for h in self.hours))
        object.__setattr__(self, "columns", cols)
        if self.payback_columns is not None:
            object.__setattr__(self, "payback_columns", _frozen(self.payback_columns))

    @property
    def n_options(self) -> int:
        return self.columns.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.columns[:, j]

    def index_of(self, column: Sequence[int]) -> int:
        target = np.asarray(column, dtype=np.int8)
        hits = np.flatnonzero((self.columns == target[:, None]).all(axis=0))
        if hits.size == 0:
            raise KeyError(f"column {list(column)} is not an option")
        return int(hits[0])

    @property
    def zero_index(self) -> int:
        return int(np.flatnonzero(self.columns.sum(axis=0) == 0)[0])


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str

    def __str__(self):
        return f"{self.field}: {self.rule}"


def validate_day_context(ctx: DayContext) -> list:
    out = []
    for name in ("forecast_load", "actual_load", "temperature"):
        prof = getattr(ctx, name)
        if len(prof) != HOURS_PER_DAY:
            out.append(Violation(name, f"length must be 24, got {len(prof)}"))
        if not np.isfinite(prof.values).all():
            out.append(Violation(name, "values must be finite"))
        if name != "temperature" and (prof.values < 0).any():
            out.append(Violation(name, "load values must be >= 0"))
    p = ctx.peak_day_probability
    if not (0.0 <= p <= 1.0):
        out.append(Violation("peak_day_probability", f"must lie in [0, 1], got {p}"))
    ph = ctx.peak_hour_probabilities
    if len(ph) != HOURS_PER_DAY:
        out.append(Violation("peak_hour_probabilities", f"length must be 24, got {len(ph)}"))
    if not np.isfinite(ph).all() or (ph < 0).any() or (ph > 1).any():
        out.append(Violation("peak_hour_probabilities", "entries must lie in [0, 1]"))
    elif ph.sum() > 1.0 + 1e-9:
        out.append(Violation("peak_hour_probabilities", f"must sum to <= 1, got {ph.sum():.6g}"))
    return out


def top_x_hours(values, x: int) -> TargetHourSet:
    """The ``x`` hours with the largest values; equal values go to the earlier hour."""
    vals = np.asarray(values, dtype=float)
    if not 1 <= x <= len(vals) or len(vals) > HOURS_PER_DAY:
        raise ValueError(f"x must lie in 1..{len(vals)}, got {x}")
    # stable sort on the negated values keeps earlier hours first among ties
    order = np.argsort(-vals, kind="stable")
    return TargetHourSet(tuple(sorted(int(h) for h in order[:x])))


def runs(on) -> list:
    """Maximal runs of consecutive truthy entries as (start, end) inclusive pairs."""
    out = []
    start = None
    for i, v in enumerate(on):
        if v and start is None:
            start = i
        elif not v and start is not None:
            out.append((start, i - 1))
            start = None
    if start is not None:
        out.append((start, len(on) - 1))
    return out


def embed(hours: Sequence[int], column, length: int = HOURS_PER_DAY) -> np.ndarray:
    """Place a per-hour column onto the 24-hour clock (other hours zero)."""
    out = np.zeros(length, dtype=np.asarray(column).dtype)
    out[list(hours)] = column
    return out
