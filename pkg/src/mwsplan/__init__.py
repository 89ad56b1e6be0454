"""Network planning with multi-wavelength transmitter sources.

Submodules: ``netmodel`` (topology, demands, transponder configurations),
``txchain`` (transmit OSNR), ``qot`` (path SNR), ``rcsa`` (routing and spectrum
assignment) and ``study`` (ART sweeps and cost metrics).
"""

from mwsplan.netmodel import (Demand, Scenario, ScenarioKind, Topology, TopologyError, TransponderConfig,
                              bundled_topology, config_grid, load_demands, load_topology, make_config)
from mwsplan.qot import FiberParams, LaunchSpec, config_table, path_snr, required_snr
from mwsplan.rcsa import Plan, PlanInvariantError, plan_all, validate_plan
from mwsplan.study import PlanResult, cost_breakeven, gravity_demands, laser_count, run_cell, run_sweep
from mwsplan.txchain import LightSourceSpec, Scheme, TxArchitecture, osnr_tx, sws_reference_osnr

__version__ = "0.1.0"

__all__ = [
    "Demand", "FiberParams", "LaunchSpec", "LightSourceSpec", "Plan", "PlanInvariantError", "PlanResult",
    "Scenario", "ScenarioKind", "Scheme", "Topology", "TopologyError", "TransponderConfig", "TxArchitecture",
    "bundled_topology", "config_grid", "config_table", "cost_breakeven", "gravity_demands", "laser_count",
    "load_demands", "load_topology", "make_config", "osnr_tx", "path_snr", "plan_all", "required_snr",
    "run_cell", "run_sweep", "sws_reference_osnr", "validate_plan",
]
