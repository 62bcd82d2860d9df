"""Serial-time ledger of a parameterized machine running a workload.

The model splits the wall time of a run into the payload time that is spread
evenly over ``n`` units, ``T_pp``, and a set of named serial contributions
``T_X`` that only one unit performs while the others wait.  Each contribution
maps onto a share of the serial fraction through the linear identity

    (1 - alpha_X) = T_X / (T_pp * (n - 1))

so the shares add up to the total serial fraction without any composition
rule, and the resulting efficiency equals both ``T_pp / (T_pp + sum T_X)``
and the Amdahl efficiency of the total.

Default parameters describe a fictive machine: 1 Gflop/s cores clocked at
1 GHz, 10 s of one-time software/OS set-up, 1 us per-core addressing, 1 us
per message, and a propagation delay of ``10 ns * n**(1/3)``.  The default
problem takes 1000 s on a one-million-core machine without overheads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import core


class Contribution(str, Enum):
    SW_OS_FIXED = "sw_os_fixed"
    LOOPING = "looping"
    PROPAGATION = "propagation"
    APPLICATION_ITERATION = "application_iteration"
    GRID_SYNC = "grid_sync"


CONTRIBUTIONS: Tuple[Contribution, ...] = tuple(Contribution)

REFERENCE_CORES = 1_000_000
REFERENCE_RUN_TIME = 1000.0


@dataclass(frozen=True)
class MachineSpec:
    """Per-core performance and the serial time constants of a machine.

    ``serial_compute_scale`` multiplies serial work that is computation rather
    than communication (the coordinator recomputing HPCG parameters); the
    accelerator and precision modifiers adjust it.
    """

    p_single: float = 1e9
    clock_hz: float = 1e9
    t_fix: float = 10.0
    t_addr: float = 1e-6
    t_msg: float = 1e-6
    prop_coeff: float = 1e-8
    prop_exponent: float = 1.0 / 3.0
    serial_compute_scale: float = 1.0

    def __post_init__(self):
        if not self.p_single > 0:
            raise ValueError(f"p_single: must be > 0, got {self.p_single!r}")
        if self.p_single < 1:
            raise ValueError(f"p_single: must be at least 1 flop/s, got {self.p_single!r}")
        if not self.clock_hz > 0:
            raise ValueError(f"clock_hz: must be > 0, got {self.clock_hz!r}")
        for name in ("t_fix", "t_addr", "t_msg", "prop_coeff", "prop_exponent",
                     "serial_compute_scale"):
            value = getattr(self, name)
            if not value >= 0 or math.isinf(value):
                raise ValueError(f"{name}: must be a finite value >= 0, got {value!r}")

    @property
    def clock_period(self) -> float:
        return 1.0 / self.clock_hz


FICTIVE_MACHINE = MachineSpec()


class WorkloadKind(str, Enum):
    HPL = "hpl"
    HPCG = "hpcg"
    GRID = "grid"


class Scaling(str, Enum):
    STRONG = "strong"
    FIXED_TIME = "fixed_time"


@dataclass(frozen=True)
class WorkloadSpec:
    """What the machine runs.

    ``total_flops`` is the whole problem under strong scaling and the work of
    one unit under fixed-time scaling (the problem then grows with ``n``).

    HPCG-like runs add ``iterations`` rounds in which the coordinator sends
    and collects one message per unit and then recomputes the parameters;
    the recompute costs ``recompute_fraction`` of that round's message time.

    Grid-synchronized runs advance in ``periods`` ticks of ``grid_period``
    seconds.  The serial machinery can only act once per tick, so the
    per-unit addressing and message costs stretch by ``grid_period *
    clock_hz`` (the tick length measured in machine clocks).  Every tick the
    coordinator also synchronizes with each unit plus
    ``per_period_serial_msgs`` further messages.
    """

    kind: WorkloadKind = WorkloadKind.HPL
    total_flops: float = REFERENCE_CORES * REFERENCE_RUN_TIME * 1e9
    iterations: int = 1
    recompute_fraction: float = 0.1
    grid_period: Optional[float] = None
    periods: int = 1
    per_period_serial_msgs: int = 0
    scaling: Scaling = Scaling.STRONG

    def __post_init__(self):
        object.__setattr__(self, "kind", WorkloadKind(self.kind))
        object.__setattr__(self, "scaling", Scaling(self.scaling))
        if not self.total_flops > 0 or math.isinf(self.total_flops):
            raise ValueError(f"total_flops: must be a finite value > 0, got {self.total_flops!r}")
        if self.iterations < 1:
            raise ValueError(f"iterations: must be >= 1, got {self.iterations!r}")
        if self.recompute_fraction < 0:
            raise ValueError(f"recompute_fraction: must be >= 0, got {self.recompute_fraction!r}")
        if self.kind is WorkloadKind.GRID:
            if self.grid_period is None or not self.grid_period > 0:
                raise ValueError(f"grid_period: must be > 0, got {self.grid_period!r}")
            if self.periods < 1:
                raise ValueError(f"periods: must be >= 1, got {self.periods!r}")
            if self.per_period_serial_msgs < 0:
                raise ValueError("per_period_serial_msgs: must be >= 0, "
                                 f"got {self.per_period_serial_msgs!r}")

    @classmethod
    def hpl(cls, total_flops: Optional[float] = None, **kw) -> "WorkloadSpec":
        if total_flops is not None:
            kw["total_flops"] = total_flops
        return cls(kind=WorkloadKind.HPL, **kw)

    @classmethod
    def hpcg(cls, iterations: int = 10, total_flops: Optional[float] = None, **kw) -> "WorkloadSpec":
        if total_flops is not None:
            kw["total_flops"] = total_flops
        return cls(kind=WorkloadKind.HPCG, iterations=iterations, **kw)

    @classmethod
    def grid_synced(cls, grid_period: float, periods: int = 100, per_period_serial_msgs: int = 1,
                    total_flops: Optional[float] = None, **kw) -> "WorkloadSpec":
        if total_flops is not None:
            kw["total_flops"] = total_flops
        return cls(kind=WorkloadKind.GRID, grid_period=grid_period, periods=periods,
                   per_period_serial_msgs=per_period_serial_msgs, **kw)


def grid_stretch(m: MachineSpec, w: WorkloadSpec) -> float:
    """Length of one grid tick in machine clock periods (1 when not grid-synced)."""
    if w.kind is not WorkloadKind.GRID:
        return 1.0
    stretch = w.grid_period * m.clock_hz
    if stretch < 1.0:
        raise ValueError("grid_period: shorter than one machine clock period")
    return stretch


def payload_time(m: MachineSpec, w: WorkloadSpec, n: float) -> float:
    if w.scaling is Scaling.FIXED_TIME:
        return w.total_flops / m.p_single
    return w.total_flops / (n * m.p_single)


def payload_flops(w: WorkloadSpec, n: float) -> float:
    if w.scaling is Scaling.FIXED_TIME:
        return w.total_flops * n
    return w.total_flops


def serial_times(m: MachineSpec, w: WorkloadSpec, n: float) -> Dict[Contribution, float]:
    """Seconds spent in each serial contribution at ``n`` units."""
    if n < 2:
        raise ValueError(f"n: must be >= 2, got {n!r}")
    stretch = grid_stretch(m, w)
    times = dict.fromkeys(CONTRIBUTIONS, 0.0)
    times[Contribution.SW_OS_FIXED] = m.t_fix
    times[Contribution.LOOPING] = n * m.t_addr * stretch
    times[Contribution.PROPAGATION] = m.prop_coeff * n ** m.prop_exponent
    if w.kind is WorkloadKind.HPCG:
        comm = 2.0 * n * m.t_msg
        recompute = w.recompute_fraction * comm * m.serial_compute_scale
        times[Contribution.APPLICATION_ITERATION] = w.iterations * (comm + recompute)
    elif w.kind is WorkloadKind.GRID:
        times[Contribution.GRID_SYNC] = (
            w.periods * (n + w.per_period_serial_msgs) * m.t_msg * stretch)
    return times


@dataclass(frozen=True)
class SerialLedger:
    n: float
    nominal: float
    payload_time: float
    times: Dict[Contribution, float]
    shares: Dict[Contribution, float]
    one_minus_alpha_total: float
    alpha_eff: float
    r_max: float
    efficiency: float
    beyond_model: bool = False

    @property
    def serial_time(self) -> float:
        return sum(self.times[c] for c in CONTRIBUTIONS)

    @property
    def total_time(self) -> float:
        return self.payload_time + self.serial_time

    def point(self) -> core.AmdahlPoint:
        """The equivalent Amdahl operating point (only inside the model's range)."""
        return core.AmdahlPoint.from_serial(self.one_minus_alpha_total, self.n)


def ledger(m: MachineSpec, w: WorkloadSpec, n: float) -> SerialLedger:
    t_pp = payload_time(m, w, n)
    times = serial_times(m, w, n)
    denom = t_pp * (n - 1.0)
    shares = {c: times[c] / denom for c in CONTRIBUTIONS}
    # total defined as the sum of the shares: additivity is exact
    total = 0.0
    for c in CONTRIBUTIONS:
        total += shares[c]
    serial = sum(times[c] for c in CONTRIBUTIONS)
    nominal = n * m.p_single
    r_max = payload_flops(w, n) / (t_pp + serial)
    return SerialLedger(
        n=n,
        nominal=nominal,
        payload_time=t_pp,
        times=times,
        shares=shares,
        one_minus_alpha_total=total,
        alpha_eff=1.0 - total,
        r_max=r_max,
        efficiency=r_max / nominal,
        beyond_model=total > 1.0,
    )


def log_grid(n_min: float, n_max: float, points_per_decade: int = 10) -> List[int]:
    """Distinct integer unit counts, evenly spaced in log10 between the bounds."""
    if n_min < 2 or n_max < n_min:
        raise ValueError("need 2 <= n_min <= n_max")
    decades = math.log10(n_max) - math.log10(n_min)
    count = max(int(round(decades * points_per_decade)) + 1, 2)
    values = np.unique(np.rint(np.logspace(math.log10(n_min), math.log10(n_max), count)))
    return [int(v) for v in values]


def sweep(m: MachineSpec, w: WorkloadSpec, n_values: Iterable[float]) -> List[Tuple[float, SerialLedger]]:
    """Ledgers at every unit count, paired with the nominal performance."""
    n_values = list(n_values)
    if not n_values:
        raise ValueError("n_values: must be non-empty")
    out = []
    for n in n_values:
        entry = ledger(m, w, n)
        out.append((entry.nominal, entry))
    return out


@dataclass(frozen=True)
class PeakPoint:
    n: float
    r_max: float
    nominal: float
    interior: bool

    @property
    def warning(self) -> Optional[str]:
        return None if self.interior else "peak not interior"


def peak_operating_point(m: MachineSpec, w: WorkloadSpec, n_values: Sequence[float]) -> PeakPoint:
    """Unit count with the highest payload performance over the sweep.

    ``interior`` is False when the best point sits on either end of the range,
    meaning the true maximum may lie outside it.
    """
    n_values = list(n_values)
    if len(n_values) < 3:
        raise ValueError("n_values: need at least 3 points to locate a peak")
    points = sweep(m, w, n_values)
    r = [entry.r_max for _, entry in points]
    i = int(np.argmax(r))
    return PeakPoint(n=points[i][1].n, r_max=r[i], nominal=points[i][0],
                     interior=0 < i < len(points) - 1)


def linear_serial_coefficient(m: MachineSpec, w: WorkloadSpec) -> float:
    """Seconds of serial time added per extra unit by the terms linear in ``n``."""
    stretch = grid_stretch(m, w)
    coeff = m.t_addr * stretch
    if w.kind is WorkloadKind.HPCG:
        coeff += w.iterations * 2.0 * m.t_msg * (1.0 + w.recompute_fraction * m.serial_compute_scale)
    elif w.kind is WorkloadKind.GRID:
        coeff += w.periods * m.t_msg * stretch
    return coeff


def analytic_peak_n(m: MachineSpec, w: WorkloadSpec) -> float:
    """Minimizer of ``W/(n P) + a n`` under strong scaling, ignoring propagation.

    ``a`` is :func:`linear_serial_coefficient`.  Returns ``inf`` when no serial
    term grows with ``n``.
    """
    if w.scaling is not Scaling.STRONG:
        raise ValueError("closed-form peak exists for strong scaling only")
    a = linear_serial_coefficient(m, w)
    if a == 0:
        return math.inf
    return math.sqrt(w.total_flops / (m.p_single * a))


def without(m: MachineSpec, *contributions: Contribution) -> MachineSpec:
    """Copy of ``m`` with the machine constants behind the given contributions zeroed.

    APPLICATION_ITERATION and GRID_SYNC both live on ``t_msg``; zeroing either
    removes the message cost.
    """
    changes = {}
    for c in contributions:
        c = Contribution(c)
        if c is Contribution.SW_OS_FIXED:
            changes["t_fix"] = 0.0
        elif c is Contribution.LOOPING:
            changes["t_addr"] = 0.0
        elif c is Contribution.PROPAGATION:
            changes["prop_coeff"] = 0.0
        else:
            changes["t_msg"] = 0.0
    return replace(m, **changes)


def saturation_profiles(m: MachineSpec = FICTIVE_MACHINE,
                        hpcg_iterations: int = 10,
                        mixed_precision_scale: float = 0.25) -> Dict[str, Tuple[MachineSpec, WorkloadSpec]]:
    """Machine/workload pairs for the family of saturation curves.

    HPCG and HPL in double precision, HPL with reduced-precision arithmetic,
    an "empty loop" that does no floating-point work (only addressing and
    messaging remain serial; the payload rate is the clock rate), and a
    machine limited only by its physical size.  All use fixed-time scaling.
    """
    hpl = WorkloadSpec.hpl(total_flops=m.p_single * REFERENCE_RUN_TIME, scaling=Scaling.FIXED_TIME)
    hpcg = replace(hpl, kind=WorkloadKind.HPCG, iterations=hpcg_iterations)
    mixed = replace(m, p_single=m.p_single / mixed_precision_scale,
                    serial_compute_scale=m.serial_compute_scale * mixed_precision_scale)
    empty_loop = replace(m, t_fix=0.0, p_single=m.clock_hz)
    empty_w = replace(hpl, total_flops=m.clock_hz * REFERENCE_RUN_TIME)
    physical = replace(m, t_fix=0.0, t_addr=0.0, t_msg=0.0)
    return {
        "HPCG": (m, hpcg),
        "HPL": (m, hpl),
        "HPL-AI": (mixed, replace(hpl, total_flops=hpl.total_flops / mixed_precision_scale)),
        "FP-0": (empty_loop, empty_w),
        "physical-size": (physical, hpl),
    }
