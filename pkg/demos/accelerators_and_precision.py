"""
Accelerators and reduced precision
==================================

"""

from amdahl_limits.ledger import FICTIVE_MACHINE, WorkloadSpec, ledger
from amdahl_limits.modifiers import (
    Accelerator, apply_accelerator, gain_ratio, hpl_ai_equivalence, mixed_precision_speedup,
)

m, w = FICTIVE_MACHINE, WorkloadSpec.hpl()

# a 5x accelerator, but copying data to it costs four addressing steps per core
acc = apply_accelerator(m, Accelerator.default_for(m))
for n in (1_000, 100_000, 1_000_000, 7_000_000):
    print(f"n={n:>9}: gain x{gain_ratio(m, acc, w, n):.2f}, "
          f"efficiency {ledger(m, w, n).efficiency:.4f} -> {ledger(acc, w, n).efficiency:.4f}")

# quartering the compute time helps only the computing part of the run
print("speedup with comm = compute/8:", mixed_precision_speedup(1.0, 1 / 8, 0.25))
print("mixed vs double precision result ratio:", hpl_ai_equivalence(445, 148.6))
