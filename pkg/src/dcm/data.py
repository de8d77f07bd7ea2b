"""Hourly CSV ingestion and scenario directories (``timestamp,value`` rows)."""

from __future__ import annotations

import csv
from datetime import date, datetime, timedelta
from pathlib import Path

import numpy as np

from .core import HOURS_PER_DAY, DayContext, HourlyProfile
from .sim import DataError

TIMESTAMP_FMT = "%Y-%m-%dT%H:00"
DATE_FMT = "%Y-%m-%d"

SCENARIO_FILES = {
    "actual": "actual_load.csv",
    "forecast": "forecast_load.csv",
    "temperature": "temperature.csv",
    "peak_hour_probability": "peak_hour_probability.csv",
    "peak_day_probability": "peak_day_probability.csv",
}


class CsvFormatError(DataError):
    pass


def format_value(x: float) -> str:
    # repr round-trips exactly
    return repr(float(x))


def _rows(path):
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: file not found")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) != 2:
            raise CsvFormatError(f"{path}:1: expected a two-column header")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise CsvFormatError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            yield lineno, row[0].strip(), row[1].strip()


def _parse_float(path, lineno, text):
    try:
        value = float(text)
    except ValueError:
        raise CsvFormatError(f"{path}:{lineno}: bad number {text!r}") from None
    if not np.isfinite(value):
        raise CsvFormatError(f"{path}:{lineno}: non-finite value {text!r}")
    return value


def _parse_ts(path, lineno, text, fmt):
    try:
        return datetime.strptime(text, fmt)
    except ValueError:
        raise CsvFormatError(f"{path}:{lineno}: bad timestamp {text!r} (want {fmt})") from None


def _read_series(path, fmt, step):
    stamps, values = [], []
    prev = None
    for lineno, ts, val in _rows(path):
        t = _parse_ts(path, lineno, ts, fmt)
        if prev is not None:
            if t == prev:
                raise CsvFormatError(f"{path}:{lineno}: duplicate timestamp {ts}")
            if t < prev:
                raise CsvFormatError(f"{path}:{lineno}: timestamp {ts} goes backwards")
            if t != prev + step:
                raise CsvFormatError(f"{path}:{lineno}: gap before {ts} (previous {prev.strftime(fmt)})")
        stamps.append(t)
        values.append(_parse_float(path, lineno, val))
        prev = t
    if not values:
        raise CsvFormatError(f"{path}: no data rows")
    return stamps, values


def load_timeseries_csv(path) -> HourlyProfile:
    stamps, values = _read_series(path, TIMESTAMP_FMT, timedelta(hours=1))
    return HourlyProfile(np.array(values), stamps[0])


def load_daily_csv(path) -> tuple:
    stamps, values = _read_series(path, DATE_FMT, timedelta(days=1))
    return stamps[0].date(), np.array(values)


def write_timeseries_csv(path, profile: HourlyProfile, header=("timestamp", "value")):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for i, v in enumerate(profile.values):
            fh.write(f"{profile.timestamp(i).strftime(TIMESTAMP_FMT)},{format_value(v)}\n")


def write_daily_csv(path, start: date, values, header=("date", "value")):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for i, v in enumerate(values):
            fh.write(f"{(start + timedelta(days=i)).strftime(DATE_FMT)},{format_value(v)}\n")


def _concat(days, attr) -> HourlyProfile:
    return HourlyProfile(np.concatenate([getattr(d, attr).values for d in days]), days[0].date)


def save_scenario(days, outdir) -> list:
    days = tuple(getattr(days, "days", days))
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for key, attr in (("actual", "actual_load"), ("forecast", "forecast_load"),
                      ("temperature", "temperature")):
        p = out / SCENARIO_FILES[key]
        write_timeseries_csv(p, _concat(days, attr))
        written.append(p)
    probs = np.concatenate([d.peak_hour_probabilities for d in days])
    p = out / SCENARIO_FILES["peak_hour_probability"]
    write_timeseries_csv(p, HourlyProfile(probs, days[0].date))
    written.append(p)
    p = out / SCENARIO_FILES["peak_day_probability"]
    write_daily_csv(p, days[0].date, [d.peak_day_probability for d in days])
    written.append(p)
    return written


def load_scenario_dir(path) -> tuple:
    """Read the five scenario files back into consecutive day contexts."""
    root = Path(path)
    series = {k: load_timeseries_csv(root / SCENARIO_FILES[k])
              for k in ("actual", "forecast", "temperature", "peak_hour_probability")}
    first_day, day_probs = load_daily_csv(root / SCENARIO_FILES["peak_day_probability"])
    n_hours = {len(s) for s in series.values()}
    starts = {s.start for s in series.values()}
    if len(n_hours) != 1 or len(starts) != 1:
        raise DataError(f"{root}: hourly files differ in length or start")
    (n,), (start,) = n_hours, starts
    if n % HOURS_PER_DAY or start.hour != 0:
        raise DataError(f"{root}: hourly files must cover whole days starting at hour 0")
    if n // HOURS_PER_DAY != len(day_probs) or first_day != start.date():
        raise DataError(f"{root}: peak-day probabilities do not match the hourly files")
    days = []
    for i in range(len(day_probs)):
        d = first_day + timedelta(days=i)
        days.append(DayContext(
            date=d,
            forecast_load=series["forecast"].day(i),
            actual_load=series["actual"].day(i),
            temperature=series["temperature"].day(i),
            peak_day_probability=float(day_probs[i]),
            peak_hour_probabilities=series["peak_hour_probability"].day(i).values,
        ))
    return tuple(days)
