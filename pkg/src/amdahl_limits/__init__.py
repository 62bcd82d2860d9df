"""Amdahl-law performance limits of parallel machines.

Closed-form speedup and efficiency, a ledger of the serial contributions that
cap a machine's payload performance, a discrete-event timeline of one
dispatch/compute/collect run, communication counts per workload class,
machine modifiers, and ingestion of ranked-machine lists.
"""
from .core import (
    AmdahlPoint, ModelDomainError, alpha_from_efficiency, alpha_from_speedup, efficiency,
    perf_gain_limit, perf_total, serial_from_efficiency, speedup,
)
from .ledger import (
    FICTIVE_MACHINE, Contribution, MachineSpec, Scaling, WorkloadKind, WorkloadSpec, log_grid,
    peak_operating_point, sweep,
)
# the ledger() function stays in its module so the submodule name is not shadowed
from .timeline import DispatchMode, TimelineConfig, simulate

__version__ = "0.1.0"

__all__ = [
    "AmdahlPoint", "ModelDomainError", "alpha_from_efficiency", "alpha_from_speedup",
    "efficiency", "perf_gain_limit", "perf_total", "serial_from_efficiency", "speedup",
    "FICTIVE_MACHINE", "Contribution", "MachineSpec", "Scaling", "WorkloadKind", "WorkloadSpec",
    "log_grid", "peak_operating_point", "sweep",
    "DispatchMode", "TimelineConfig", "simulate",
]
