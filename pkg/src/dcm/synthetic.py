"""Synthetic stand-in for utility load, weather and peak-probability feeds.

Summer days carry a single afternoon peak, winter days a morning and an evening
peak. Forecasts are the actual load with autocorrelated multiplicative noise.
Peak-hour probabilities mix an indicator of the true peak hour with a softmax
over a noisy copy of the load; ``fidelity`` sets the mixing weight. Peak-day
probabilities are rank scores of the day's peak within its month, raised to a
power so that only the top few days of a month look likely to set its peak.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from .core import HOURS_PER_DAY, DayContext, HourlyProfile

SUMMER = (5, 6, 7, 8, 9)
WINTER = (11, 12, 1, 2, 3)


@dataclass(frozen=True)
class ScenarioParams:
    seed: int = 0
    year: int = 2021
    peak_mw: float = 13_000.0
    sigma: float = 0.015          # relative day-ahead forecast error
    fidelity: float = 0.8         # 1.0 = peak probabilities point at the true peak
    temp_anomaly_std: float = 2.5
    load_noise: float = 0.008
    summer_peak_hour: float = 17.0
    winter_peaks: tuple = (7.5, 18.5)
    day_prob_sharpness: float = 3.0  # exponent on the within-month rank score


@dataclass(frozen=True, eq=False)
class Scenario:
    params: ScenarioParams
    days: tuple

    def __len__(self):
        return len(self.days)


def _shape(month: int, hours: np.ndarray, p: ScenarioParams) -> np.ndarray:
    summer = 0.62 + 0.38 * np.exp(-((hours - p.summer_peak_hour) / 4.0) ** 2)
    m, e = p.winter_peaks
    winter = (0.64 + 0.26 * np.exp(-((hours - m) / 1.8) ** 2)
              + 0.30 * np.exp(-((hours - e) / 2.2) ** 2))
    if month in SUMMER:
        return summer
    if month in WINTER:
        return winter
    return 0.5 * (summer + winter)


def _rank_scores(values: np.ndarray) -> np.ndarray:
    n = len(values)
    if n == 1:
        return np.ones(1)
    order = np.argsort(-values, kind="stable")
    ranks = np.empty(n)
    ranks[order] = np.arange(n)
    return 1.0 - ranks / (n - 1)


def _softmax(x: np.ndarray) -> np.ndarray:
    z = np.exp(x - x.max())
    return z / z.sum()


def generate_synthetic_scenario(params: ScenarioParams = ScenarioParams()) -> Scenario:
    rng = np.random.default_rng(params.seed)
    start = date(params.year, 1, 1)
    n_days = (date(params.year + 1, 1, 1) - start).days
    hours = np.arange(HOURS_PER_DAY, dtype=float)
    dates = [start + timedelta(days=i) for i in range(n_days)]

    # weather: seasonal mean, afternoon maximum, day-to-day fronts as AR(1)
    anomaly = np.zeros(n_days)
    for i in range(1, n_days):
        anomaly[i] = 0.7 * anomaly[i - 1] + params.temp_anomaly_std * np.sqrt(1 - 0.49) * rng.standard_normal()
    temps, loads = [], []
    for i, d in enumerate(dates):
        doy = d.timetuple().tm_yday
        mean = 16.0 - 10.0 * np.cos(2 * np.pi * (doy - 15) / 365.0) + anomaly[i]
        t = mean + 6.0 * np.cos(2 * np.pi * (hours - 15.0) / 24.0) + 0.4 * rng.standard_normal(HOURS_PER_DAY)
        weekend = 0.94 if d.weekday() >= 5 else 1.0
        base = 7_000.0 * _shape(d.month, hours, params) * weekend
        cooling = 160.0 * np.maximum(t - 21.0, 0.0) * (0.6 + 0.4 * _shape(5, hours, params))
        heating = 120.0 * np.maximum(12.0 - t, 0.0) * (0.6 + 0.4 * _shape(1, hours, params))
        load = (base + cooling + heating) * (1.0 + params.load_noise * rng.standard_normal(HOURS_PER_DAY))
        temps.append(t)
        loads.append(load)
    loads = np.array(loads)
    loads *= params.peak_mw / loads.max()
    temps = np.array(temps)

    # forecast error: hourly AR(1) inside each day
    eps = np.zeros_like(loads)
    z = rng.standard_normal(loads.shape)
    eps[:, 0] = z[:, 0]
    for h in range(1, HOURS_PER_DAY):
        eps[:, h] = 0.7 * eps[:, h - 1] + np.sqrt(1 - 0.49) * z[:, h]
    forecast = loads * (1.0 + params.sigma * eps)

    noisy = loads * (1.0 + 0.01 * rng.standard_normal(loads.shape))
    f = params.fidelity
    probs = np.empty_like(loads)
    for i in range(n_days):
        onehot = np.zeros(HOURS_PER_DAY)
        onehot[int(np.argmax(loads[i]))] = 1.0
        soft = _softmax((noisy[i] - noisy[i].max()) / (0.01 * noisy[i].max()))
        probs[i] = onehot if f >= 1.0 else f * onehot + (1.0 - f) * soft

    day_peak = loads.max(axis=1)
    noisy_peak = noisy.max(axis=1)
    day_prob = np.empty(n_days)
    months = np.array([d.month for d in dates])
    for m in range(1, 13):
        idx = np.flatnonzero(months == m)
        score = f * _rank_scores(day_peak[idx]) + (1.0 - f) * _rank_scores(noisy_peak[idx])
        day_prob[idx] = score ** params.day_prob_sharpness

    days = tuple(
        DayContext(
            date=d,
            forecast_load=HourlyProfile(forecast[i], d),
            actual_load=HourlyProfile(loads[i], d),
            temperature=HourlyProfile(temps[i], d),
            peak_day_probability=float(np.clip(day_prob[i], 0.0, 1.0)),
            peak_hour_probabilities=np.clip(probs[i], 0.0, 1.0),
        )
        for i, d in enumerate(dates)
    )
    return Scenario(params, days)


def payback_demo_day(day: date = date(2020, 8, 25)) -> DayContext:
    """Hot August day whose likeliest peak hours are 17:00 and 19:00.

    Load peaks between 18:00 and 19:00 and is still high at 20:00, so HVAC payback
    after an evening DR block can create a new peak at 20:00.
    """
    h = np.arange(HOURS_PER_DAY, dtype=float)
    load = 9_000.0 + 3_600.0 * np.exp(-((h - 18.5) / 4.0) ** 2)
    temp = 27.0 + 9.0 * np.exp(-((h - 17.0) / 4.5) ** 2)
    probs = np.full(HOURS_PER_DAY, 0.01)
    probs[[17, 19]] = 0.30
    probs[18] = 0.20
    probs /= probs.sum()
    return DayContext(day, HourlyProfile(load, day), HourlyProfile(load, day),
                      HourlyProfile(temp, day), 0.95, probs)
