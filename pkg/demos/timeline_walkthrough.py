"""
One run, event by event
=======================

"""

from amdahl_limits.ledger import FICTIVE_MACHINE, WorkloadSpec
from amdahl_limits.timeline import (
    TimelineConfig, compare_to_analytic, config_from_spec, simulate,
)

# two workers with one second of work each; addressing each costs half a second
r = simulate(TimelineConfig(2, 1.0, t_addr=0.5), trace=True)
print(r.format_trace())
print("total", r.total_time, "speedup", r.speedup, "empirical alpha", r.empirical_alpha)

# blocking dispatch waits for each delivery before addressing the next worker
slow = simulate(TimelineConfig(2, 1.0, t_addr=0.5, pd_out=0.25, dispatch_mode="blocking"))
print("blocking total", slow.total_time)

# a fictive-machine run, simulated and compared with the closed-form ledger
w = WorkloadSpec.hpl()
check = compare_to_analytic(config_from_spec(FICTIVE_MACHINE, w, 10_000), FICTIVE_MACHINE, w)
print("simulated E", check.simulated_efficiency, "ledger E", check.ledger_efficiency)
