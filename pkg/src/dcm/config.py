"""Run configuration: one INI-style file with a section per module.

Every numeric parameter of a run lives in the file; the only environment override
is ``DCM_OUTPUT_DIR`` for the output directory.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .cvr import CvrSpec
from .dispatch import ObjectiveConfig, ResourceFleet
from .resources import BessSpec, DgSpec
from .sim import SUMMER_DR_MONTHS, Tariff
from .strategy import GateConfig, Strategy, StrategyChoice
from .synthetic import ScenarioParams
from .tcl import TclGroupSpec

OUTPUT_ENV = "DCM_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DataSource:
    kind: str = "synthetic"  # or "csv"
    directory: Optional[Path] = None
    scenario: ScenarioParams = ScenarioParams()


@dataclass(frozen=True)
class SweepSettings:
    resource: str = "bess"
    ratings: tuple = (100.0, 200.0, 300.0, 400.0, 500.0)
    duration_hours: float = 2.0


@dataclass(frozen=True)
class RunConfig:
    fleet: ResourceFleet = field(default_factory=ResourceFleet.default)
    gate: GateConfig = GateConfig()
    strategy: StrategyChoice = StrategyChoice()
    objective: ObjectiveConfig = ObjectiveConfig()
    tariff: Tariff = Tariff()
    data: DataSource = DataSource()
    tcl_months: tuple = SUMMER_DR_MONTHS
    sweep: SweepSettings = SweepSettings()
    output_dir: Path = Path("out")


DEFAULT_CONFIG = """\
[data]
source = synthetic
seed = 0
year = 2021
peak_mw = 13000
sigma = 0.015
fidelity = 0.8

[bess]
enabled = yes
power_mw = 10
energy_mwh = 20
energy_min_mwh = 0
efficiency = 0.95

[dg]
enabled = yes
power_mw = 40
fuel_cost = 0.245
energy_price = 0.03

[cvr]
enabled = yes
k1 = 0.40
k2 = 0.01
max_run_hours = 3
recovery_hours = 1

[tcl]
enabled = yes
months = 6,7,8,9
groups = cycling, shutoff

[tcl.cycling]
kind = cycling_10in30
unit_count = 30000
rated_kw = 5

[tcl.shutoff]
kind = full_off
unit_count = 30000
rated_kw = 5
max_consecutive_hours = 2

[gate]
error_margin = 0.10
threshold = 0.5

[strategy]
kind = s1
x = 2
payback_hour = off

[objective]
beta = 20000
tcl_hour_penalty = 500
enumeration_budget = 100000

[tariff]
demand_rate = 20

[sweep]
resource = bess
ratings = 100,200,300,400,500
duration_hours = 2

[output]
dir = out
"""

_KEYS = {
    "data": {"source", "dir", "seed", "year", "peak_mw", "sigma", "fidelity"},
    "bess": {"enabled", "power_mw", "energy_mwh", "energy_min_mwh", "efficiency"},
    "dg": {"enabled", "power_mw", "fuel_cost", "energy_price"},
    "cvr": {"enabled", "k1", "k2", "max_run_hours", "recovery_hours"},
    "tcl": {"enabled", "months", "groups"},
    "tcl.*": {"kind", "unit_count", "rated_kw", "scale_factor", "max_consecutive_hours",
              "balance_temp", "design_temp", "payback_recovery_fraction", "payback"},
    "gate": {"error_margin", "threshold"},
    "strategy": {"kind", "x", "payback_hour"},
    "objective": {"beta", "beta_f1", "beta_f2", "tcl_hour_penalty", "kind",
                  "enumeration_budget", "max_combinations"},
    "tariff": {"demand_rate"},
    "sweep": {"resource", "ratings", "duration_hours"},
    "output": {"dir"},
}


def _list(text, conv=float) -> tuple:
    return tuple(conv(t) for t in str(text).replace(";", ",").split(",") if t.strip())


def parse_switch(text) -> bool:
    t = str(text).strip().lower()
    if t in ("on", "yes", "true", "1"):
        return True
    if t in ("off", "no", "false", "0"):
        return False
    raise ConfigError(f"expected on/off, got {text!r}")


def _check_keys(cp):
    for name in cp.sections():
        allowed = _KEYS.get("tcl.*" if name.startswith("tcl.") else name)
        if allowed is None:
            raise ConfigError(f"unknown section [{name}]")
        extra = set(cp[name]) - allowed
        if extra:
            raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(extra))}")


def _tcl_group(sec) -> TclGroupSpec:
    mch = sec.get("max_consecutive_hours")
    return TclGroupSpec(
        group_kind=sec.get("kind", "cycling_10in30"),
        unit_count=sec.getint("unit_count", 30000),
        rated_power=sec.getfloat("rated_kw", 5.0),
        scale_factor=sec.getfloat("scale_factor", 1.0),
        max_consecutive_hours=None if mch in (None, "", "none", "inf") else int(mch),
        balance_temp=sec.getfloat("balance_temp", 18.0),
        design_temp=sec.getfloat("design_temp", 40.0),
        payback_recovery_fraction=sec.getfloat("payback_recovery_fraction", 1.0),
        payback_enabled=parse_switch(sec.get("payback", "on")),
    )


def parse_config(text: str, base_dir: Path = Path(".")) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
        _check_keys(cp)
        return _build(cp, base_dir)
    except ConfigError:
        raise
    except (configparser.Error, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path=None) -> RunConfig:
    if path is None:
        cfg = parse_config(DEFAULT_CONFIG)
    else:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file {p} not found")
        cfg = parse_config(p.read_text(encoding="utf-8"), p.parent)
    env = os.environ.get(OUTPUT_ENV)
    if env:
        cfg = replace(cfg, output_dir=Path(env))
    return cfg


def _section(cp, name):
    return cp[name] if cp.has_section(name) else {}


def _getf(sec, key, default):
    v = sec.get(key) if sec else None
    return default if v in (None, "") else float(v)


def _build(cp, base_dir: Path) -> RunConfig:
    d = _section(cp, "data")
    source = d.get("source", "synthetic") if d else "synthetic"
    params = ScenarioParams(
        seed=int(d.get("seed", 0)) if d else 0,
        year=int(d.get("year", 2021)) if d else 2021,
        peak_mw=_getf(d, "peak_mw", 13000.0),
        sigma=_getf(d, "sigma", 0.015),
        fidelity=_getf(d, "fidelity", 0.8),
    )
    directory = None
    if source == "csv":
        raw = d.get("dir") if d else None
        if not raw:
            raise ConfigError("[data] source = csv needs dir")
        directory = (base_dir / raw).resolve() if not Path(raw).is_absolute() else Path(raw)
        if not directory.is_dir():
            raise ConfigError(f"data directory {directory} does not exist")
    elif source != "synthetic":
        raise ConfigError(f"[data] source must be synthetic or csv, got {source!r}")
    data = DataSource(source, directory, params)

    bess = dg = cvr = None
    b = _section(cp, "bess")
    if b and parse_switch(b.get("enabled", "yes")):
        bess = BessSpec(power_max=_getf(b, "power_mw", 10.0), energy_max=_getf(b, "energy_mwh", 20.0),
                        energy_min=_getf(b, "energy_min_mwh", 0.0),
                        discharge_efficiency=_getf(b, "efficiency", 0.95))
    g = _section(cp, "dg")
    if g and parse_switch(g.get("enabled", "yes")):
        dg = DgSpec(power_max=_getf(g, "power_mw", 40.0), fuel_cost=_getf(g, "fuel_cost", 0.245),
                    energy_price=_getf(g, "energy_price", 0.03))
    c = _section(cp, "cvr")
    if c and parse_switch(c.get("enabled", "yes")):
        cvr = CvrSpec(k1=_getf(c, "k1", 0.4), k2=_getf(c, "k2", 0.01),
                      max_run_hours=int(_getf(c, "max_run_hours", 3)),
                      recovery_hours=int(_getf(c, "recovery_hours", 1)))
    groups = ()
    months = SUMMER_DR_MONTHS
    t = _section(cp, "tcl")
    if t and parse_switch(t.get("enabled", "yes")):
        months = tuple(int(m) for m in _list(t.get("months", "6,7,8,9"), int))
        names = [n.strip() for n in t.get("groups", "").split(",") if n.strip()]
        missing = [n for n in names if not cp.has_section(f"tcl.{n}")]
        if missing:
            raise ConfigError(f"missing section(s): {', '.join('[tcl.' + n + ']' for n in missing)}")
        groups = tuple(_tcl_group(cp[f"tcl.{n}"]) for n in names)
    fleet = ResourceFleet(bess=bess, dg=dg, cvr=cvr, tcl=groups)

    ga = _section(cp, "gate")
    gate = GateConfig(error_margin=_getf(ga, "error_margin", 0.10),
                      peak_day_prob_threshold=_getf(ga, "threshold", 0.5))
    s = _section(cp, "strategy")
    choice = StrategyChoice(kind=Strategy.parse(s.get("kind", "s1") if s else "s1"),
                            x=int(_getf(s, "x", 2)),
                            append_payback_hour=parse_switch(s.get("payback_hour", "off") if s else "off"))
    o = _section(cp, "objective")
    kind = o.get("kind") if o else None
    objective = ObjectiveConfig(
        beta=_getf(o, "beta", 20000.0),
        tcl_hour_penalty=_getf(o, "tcl_hour_penalty", 500.0),
        kind=kind or None,
        beta_f1=_getf(o, "beta_f1", None),
        beta_f2=_getf(o, "beta_f2", None),
        enumeration_budget=int(_getf(o, "enumeration_budget", 100000)),
        max_combinations=int(_getf(o, "max_combinations", 50_000_000)),
    )
    tariff = Tariff(demand_rate=_getf(_section(cp, "tariff"), "demand_rate", 20.0))
    sw = _section(cp, "sweep")
    sweep = SweepSettings(
        resource=(sw.get("resource", "bess") if sw else "bess").strip().lower(),
        ratings=_list(sw.get("ratings", "100,200,300,400,500")) if sw else SweepSettings.ratings,
        duration_hours=_getf(sw, "duration_hours", 2.0),
    )
    out = _section(cp, "output")
    output_dir = Path(out.get("dir", "out")) if out else Path("out")
    return RunConfig(fleet, gate, choice, objective, tariff, data, months, sweep, output_dir)
