"""
Where adding processors stops paying off
========================================

"""

import math

from amdahl_limits import ledger

m = ledger.FICTIVE_MACHINE
grid = ledger.log_grid(100, 1e10, points_per_decade=10)

# an HPL-like run: the per-core addressing cost grows with n and eventually wins
hpl = ledger.WorkloadSpec.hpl()
peak = ledger.peak_operating_point(m, hpl, grid)
print(f"HPL peak at n={peak.n}, r_max={peak.r_max:.3g} flop/s")
print(f"closed form sqrt(W/(P t_addr)) = {math.sqrt(hpl.total_flops / (m.p_single * m.t_addr)):.4g}")

# which serial contributions dominate at the peak
entry = ledger.ledger(m, hpl, peak.n)
for name, share in entry.shares.items():
    print(f"  {name.value:22s} {share:.3e}")

# the same machine synchronized to a grid tick 5000 clock cycles long
sync = ledger.WorkloadSpec.grid_synced(5000 / m.clock_hz)
grid_peak = ledger.peak_operating_point(m, sync, grid)
print(f"grid-synced peak at n={grid_peak.n}, r_max={grid_peak.r_max:.3g} flop/s")
print(f"the peak moves {peak.n / grid_peak.n:.0f}x towards fewer cores")

# fixed-time scaling: every workload saturates, the sequential part decides where
for label, (mach, work) in ledger.saturation_profiles().items():
    r = [ledger.ledger(mach, work, n).r_max for n in (1e3, 1e6, 1e9)]
    print(f"{label:14s}", " ".join(f"{x:.3g}" for x in r))
