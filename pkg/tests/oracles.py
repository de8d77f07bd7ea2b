"""Independent reference computations used by the tests.

Nothing here calls into the optimizer; the helpers re-derive option sets, HVAC
deltas and objective values from first principles so they can be compared
against the package.
"""

import itertools
from datetime import date

import numpy as np

from dcm.core import DayContext, HourlyProfile

BETA = 20_000.0


def day_context(forecast, temperature=None, probs=None, day=date(2021, 7, 15), actual=None,
                day_prob=0.9):
    forecast = np.asarray(forecast, dtype=float)
    temperature = np.full(24, 30.0) if temperature is None else np.asarray(temperature, float)
    probs = np.full(24, 1 / 24) if probs is None else np.asarray(probs, float)
    actual = forecast if actual is None else np.asarray(actual, float)
    return DayContext(day, HourlyProfile(forecast, day), HourlyProfile(actual, day),
                      HourlyProfile(temperature, day), day_prob, probs)


def longest_run(bits):
    best = cur = 0
    for b in bits:
        cur = cur + 1 if b else 0
        best = max(best, cur)
    return best


def run_spans(bits):
    spans, start = [], None
    for i, b in enumerate(list(bits) + [0]):
        if b and start is None:
            start = i
        elif not b and start is not None:
            spans.append((start, i - 1))
            start = None
    return spans


def gaps_ok(clock_bits, min_gap):
    spans = run_spans(clock_bits)
    return all(s2 - e1 - 1 >= min_gap for (_, e1), (s2, _) in zip(spans, spans[1:]))


def option_set(hours, max_run, min_gap=0):
    """Set of feasible 0/1 tuples over ``hours`` (clock embedding decides adjacency)."""
    out = set()
    for bits in itertools.product((0, 1), repeat=len(hours)):
        clock = [0] * 24
        for h, b in zip(hours, bits):
            clock[h] = b
        if longest_run(clock) <= max_run and gaps_ok(clock, min_gap):
            out.add(bits)
    return out


def tcl_delta(clock_on, temp, cap, kind, kappa=1.0, floor=0.5):
    """Shed (positive) and payback (negative) MW on the clock for one HVAC group."""
    duty = [min(1.0, max(0.0, (t - 18.0) / 22.0)) for t in temp]
    shed = [0.0] * 24
    for h in range(24):
        if clock_on[h]:
            shed[h] = duty[h] * cap if kind == "full_off" else max(0.0, duty[h] - 2 / 3) * cap
    delta = list(shed)
    h = 0
    while h < 24:
        if not clock_on[h]:
            h += 1
            continue
        e = h
        while e + 1 < 24 and clock_on[e + 1]:
            e += 1
        owed = kappa * sum(shed[h:e + 1])
        t = e + 1
        while owed > 0:
            while len(delta) <= t:
                delta.append(0.0)
            if t < 24:
                room = 0.0 if clock_on[t] else (1 - duty[t]) * cap
            else:
                room = max(1 - duty[23], floor) * cap
            room = max(0.0, room + min(0.0, delta[t]))
            take = min(room, owed)
            delta[t] -= take
            owed -= take
            t += 1
        h = e + 1
    return np.array(delta)


def brute_force(inst):
    """Best objective over quantized battery discharges and every HVAC deployment."""
    hours = inst["hours"]
    k = len(hours)
    fc = np.asarray(inst["forecast"], float)[list(hours)]
    step = inst["step"]
    levels = np.arange(0.0, inst["Pb"] + 1e-9, step)
    grid = np.array(list(itertools.product(levels, repeat=k)))
    grid = grid[grid.sum(axis=1) <= inst["B"] + 1e-9]
    best = -np.inf
    for bits in option_set(hours, inst["run_limit"]):
        clock = [0] * 24
        for h, b in zip(hours, bits):
            clock[h] = b
        delta = tcl_delta(clock, inst["temp"], inst["cap"], inst["kind"])[list(hours)]
        pen = inst["penalty"] * sum(bits)
        red = grid + delta[None, :]
        if inst["objective"] == "f1":
            mu = inst["mu"]
            vals = BETA * red @ mu - pen
        else:
            vals = BETA * (fc.max() - (fc[None, :] - red).max(axis=1)) - pen
        best = max(best, float(vals.max()))
    return best


def random_instance(rng):
    """Small dispatch problem whose continuous optimum lies on the 0.5 MW grid.

    Loads, battery limits and HVAC deltas are multiples of 6 MW, so every kink of
    the peak-shaving problem over at most four hours is a multiple of 1.5 MW.
    """
    k = int(rng.integers(1, 5))
    horizon = bool(rng.integers(0, 2))
    if horizon:
        first = int(rng.integers(12, 24 - k))
        hours = tuple(range(first, first + k))
    else:
        hours = tuple(sorted(rng.choice(np.arange(12, 22), size=k, replace=False).tolist()))
    Pb = 6.0 if k == 4 else float(rng.choice([6.0, 12.0]))
    eta = float(rng.choice([1.0, 0.5]))
    energy = 12.0 * int(rng.integers(1, 5))
    forecast = 6.0 * rng.integers(150, 171, size=24)
    temp = 18.0 + 2.2 * rng.integers(0, 11, size=24)
    kind = str(rng.choice(["full_off", "cycling_10in30"]))
    if kind == "cycling_10in30":
        # duty above 2/3 in steps that keep the shed on the 6 MW grid: cap 180 MW
        temp = 18.0 + 22.0 * (2 / 3 + rng.integers(0, 11, size=24) / 30.0)
        cap, units = 180.0, 36_000
    else:
        cap, units = 60.0, 12_000
    objective = "f2" if horizon or rng.random() < 0.5 else "f1"
    probs = rng.random(24)
    probs /= probs.sum()
    mu = probs[list(hours)] / probs[list(hours)].sum()
    return dict(hours=hours, forecast=forecast, temp=temp, Pb=Pb, eta=eta, energy=energy,
                B=eta * energy, step=0.5, kind=kind, cap=cap, units=units,
                run_limit=2 if kind == "full_off" else 24, penalty=500.0,
                objective=objective, probs=probs, mu=mu, horizon=horizon)
