"""Battery (discharge-only) and diesel generator models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KW_PER_MW = 1000.0


class InfeasibleDispatch(ValueError):
    pass


@dataclass(frozen=True)
class BessSpec:
    power_max: float
    energy_max: float
    energy_min: float = 0.0
    discharge_efficiency: float = 0.95

    def __post_init__(self):
        if not 0 <= self.energy_min < self.energy_max:
            raise ValueError("need 0 <= energy_min < energy_max")
        if self.power_max <= 0:
            raise ValueError("power_max must be positive")
        if not 0 < self.discharge_efficiency <= 1:
            raise ValueError("discharge_efficiency must lie in (0, 1]")

    @property
    def usable_energy(self) -> float:
        return self.energy_max - self.energy_min

    def full(self) -> "BessState":
        return BessState(self.energy_max)

    @classmethod
    def with_duration(cls, power_mw: float, hours: float = 2.0, **kw) -> "BessSpec":
        return cls(power_max=power_mw, energy_max=power_mw * hours, **kw)


@dataclass(frozen=True)
class BessState:
    energy: float


@dataclass(frozen=True)
class DgSpec:
    power_max: float
    fuel_cost: float = 0.245     # $/kWh
    energy_price: float = 0.03   # $/kWh of avoided purchase

    def __post_init__(self):
        if self.power_max < 0 or self.fuel_cost < 0 or self.energy_price < 0:
            raise ValueError("DG parameters must be non-negative")

    @property
    def net_cost_per_mwh(self) -> float:
        return (self.fuel_cost - self.energy_price) * KW_PER_MW


def bess_step(state: BessState, discharge: float, spec: BessSpec, dt: float = 1.0) -> BessState:
    if discharge < 0 or discharge > spec.power_max:
        raise InfeasibleDispatch(f"discharge {discharge} MW outside [0, {spec.power_max}]")
    energy = state.energy - discharge / spec.discharge_efficiency * dt
    # tolerate rounding when a discharge was computed as exactly the remaining energy
    if energy < spec.energy_min - 1e-9 * max(1.0, spec.energy_max):
        raise InfeasibleDispatch(
            f"energy {energy:.6g} MWh would fall below minimum {spec.energy_min}")
    return BessState(max(energy, spec.energy_min))


def bess_max_feasible(state: BessState, spec: BessSpec, dt: float = 1.0) -> float:
    headroom = max(0.0, state.energy - spec.energy_min) * spec.discharge_efficiency / dt
    return min(spec.power_max, headroom)


def bess_trajectory(schedule, spec: BessSpec, dt: float = 1.0, state: BessState = None) -> np.ndarray:
    """Energy at the end of each hour for a discharge schedule starting from ``state`` (full by default)."""
    state = state or spec.full()
    out = []
    for p in schedule:
        state = bess_step(state, float(p), spec, dt)
        out.append(state.energy)
    return np.array(out)


def dg_cost(schedule, spec: DgSpec, dt: float = 1.0) -> float:
    """Fuel cost net of avoided energy purchases, in dollars."""
    p = np.asarray(schedule, dtype=float)
    if (p < 0).any() or (p > spec.power_max).any():
        raise InfeasibleDispatch(f"DG output outside [0, {spec.power_max}] MW")
    return float(spec.net_cost_per_mwh * p.sum() * dt)
