"""
Speedup, efficiency and the gain roofline
=========================================

"""

import numpy as np

from amdahl_limits import core

# a parallel fraction of 0.999 looks excellent, yet 1024 units run at half efficiency
print("S(0.999, 1024) =", core.speedup(0.999, 1024))
print("E(0.999, 1024) =", core.efficiency(0.999, 1024))

# however many units we add, the gain stays below 1/(1 - alpha)
n = np.logspace(0, 10, 11)
for serial in (1e-3, 1e-5, 1e-7):
    gains = core.speedup(1 - serial, n, serial=serial)
    print(f"1-alpha={serial:g}: roofline {core.perf_gain_limit(1 - serial, serial=serial):.3g}")
    print("   ", " ".join(f"{g:.3g}" for g in gains))

# going the other way: a measured efficiency tells how sequential the run really was
print("1-alpha of a 10.6M-core run at E=0.742:", core.serial_from_efficiency(0.742, 10_649_600))
