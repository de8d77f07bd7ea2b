"""Conservation voltage reduction: feasible on/off patterns and the resulting load reduction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import OptionMatrix, TargetHourSet, embed, runs


@dataclass(frozen=True)
class CvrSpec:
    k1: float = 0.40  # share of system load on CVR-capable feeders
    k2: float = 0.01  # load reduction per unit of eligible load
    max_run_hours: int = 3
    recovery_hours: int = 1

    def __post_init__(self):
        if not (0 <= self.k1 <= 1 and 0 <= self.k2 <= 1):
            raise ValueError("k1 and k2 must lie in [0, 1]")
        if self.max_run_hours < 1 or self.recovery_hours < 1:
            raise ValueError("max_run_hours and recovery_hours must be >= 1")


def pattern_ok(day_on, max_run: int, min_gap: int = 0) -> bool:
    """Check run lengths and inter-run gaps of a 24-hour on/off pattern."""
    rr = runs(day_on)
    if any(e - s + 1 > max_run for s, e in rr):
        return False
    return all(s2 - e1 - 1 >= min_gap for (_, e1), (s2, _) in zip(rr, rr[1:]))


def enumerate_options(hours, max_run: float, min_gap: int = 0) -> np.ndarray:
    """All subsets of ``hours`` whose clock-embedded pattern passes :func:`pattern_ok`.

    Returned as an int8 matrix (len(hours) x n_options) with the all-zero option first.
    """
    hours = tuple(hours)
    cols = []
    # product over (0, 1) yields lexicographic order, so the all-zero column comes first
    for bits in itertools.product((0, 1), repeat=len(hours)):
        if pattern_ok(embed(hours, np.array(bits, dtype=np.int8)), max_run, min_gap):
            cols.append(bits)
    return np.array(cols, dtype=np.int8).T.reshape(len(hours), len(cols))


def build_cvr_options(hours: TargetHourSet, spec: CvrSpec) -> OptionMatrix:
    deploy = hours.deployable
    if not deploy:
        raise ValueError("CVR options need at least one targeted hour")
    cols = enumerate_options(deploy, spec.max_run_hours, spec.recovery_hours)
    return OptionMatrix(deploy, cols)


def cvr_reduction(load, on, spec: CvrSpec):
    return np.asarray(on) * spec.k1 * spec.k2 * np.asarray(load, dtype=float)


def apply_cvr_option(column, load_day, hours, spec: CvrSpec) -> np.ndarray:
    """Per-hour MW reduction over the deployable hours for one option column.

    ``load_day`` is the 24-hour load (forecast when planning, actual when evaluating).
    """
    deploy = hours.deployable if isinstance(hours, TargetHourSet) else tuple(hours)
    col = np.asarray(column)
    if col.shape != (len(deploy),):
        raise ValueError(f"column length {col.shape} does not match {len(deploy)} hours")
    load = np.asarray(getattr(load_day, "values", load_day), dtype=float)
    return cvr_reduction(load[list(deploy)], col, spec)
