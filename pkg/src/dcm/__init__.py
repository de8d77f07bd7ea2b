"""Coordinated demand-charge mitigation: target-hour selection, resource dispatch and billing."""

from .core import (DayContext, HourlyProfile, OptionMatrix, TargetHourSet, top_x_hours,
                   validate_day_context)
from .cvr import CvrSpec, apply_cvr_option, build_cvr_options, cvr_reduction
from .dispatch import (DispatchSchedule, ObjectiveConfig, ResourceFleet, evaluate_on_actual,
                       objective_f1, objective_f2, optimize)
from .resources import BessSpec, BessState, DgSpec, bess_max_feasible, bess_step, dg_cost
from .sim import (AnnualReport, Tariff, compare_strategies, monthly_demand_charge,
                  sensitivity_sweep, simulate_year)
from .strategy import GateConfig, MonthLedger, Strategy, StrategyChoice, gate, select_hours, update_ledger
from .synthetic import ScenarioParams, generate_synthetic_scenario
from .tcl import (TclGroupSpec, build_tcl_options, dr_profile, duty_cycle, hvac_normal_profile,
                  tcl_dr_hour_count, total_tcl_reduction)

__version__ = "0.1.0"
