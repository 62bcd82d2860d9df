"""Discrete-event simulation of one dispatch / compute / collect round.

A coordinator initializes (software, then OS), addresses the workers one after
the other, and later collects their results one at a time in arrival order.
Each worker receives its task after a propagation delay, computes, and sends
the result back after a second propagation delay.

Two dispatch policies are supported.  ``pipelined``: the coordinator starts
addressing the next worker as soon as it has finished addressing the previous
one, so addressing overlaps the messages in flight.  ``blocking``: it waits
for each message to arrive before addressing the next worker.

With a ``clock_hz`` set, every event time is rounded up to the next clock
edge and the arithmetic is carried out in exact rationals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import core
from .ledger import (CONTRIBUTIONS, Contribution, MachineSpec, WorkloadSpec, ledger,
                     payload_time, serial_times)


class DispatchMode(str, Enum):
    PIPELINED = "pipelined"
    BLOCKING = "blocking"


PerWorker = Union[float, Sequence[float]]


def _per_worker(name, value, n):
    arr = np.broadcast_to(np.asarray(value, dtype=float), (n,)) if np.ndim(value) == 0 \
        else np.asarray(value, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{name}: expected {n} values, got {arr.size}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError(f"{name}: all values must be finite and >= 0")
    return tuple(float(x) for x in arr)


@dataclass(frozen=True)
class TimelineConfig:
    n_workers: int
    t_compute: PerWorker
    t_init_sw: float = 0.0
    t_init_os: float = 0.0
    t_addr: float = 0.0
    pd_out: PerWorker = 0.0
    pd_back: PerWorker = 0.0
    t_collect: float = 0.0
    dispatch_mode: DispatchMode = DispatchMode.PIPELINED
    clock_hz: Optional[float] = None

    def __post_init__(self):
        n = self.n_workers
        if int(n) != n or n < 1:
            raise ValueError(f"n_workers: must be an integer >= 1, got {n!r}")
        object.__setattr__(self, "n_workers", int(n))
        object.__setattr__(self, "dispatch_mode", DispatchMode(self.dispatch_mode))
        for name in ("t_init_sw", "t_init_os", "t_addr", "t_collect"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"{name}: must be finite and >= 0, got {v!r}")
        for name in ("t_compute", "pd_out", "pd_back"):
            object.__setattr__(self, name, _per_worker(name, getattr(self, name), int(n)))
        if any(t <= 0 for t in self.t_compute):
            raise ValueError("t_compute: all values must be > 0")
        if self.clock_hz is not None and not self.clock_hz > 0:
            raise ValueError(f"clock_hz: must be > 0, got {self.clock_hz!r}")


@dataclass(frozen=True)
class TimelineResult:
    n_workers: int
    total_time: float
    payload_time_sum: float
    per_worker_idle: Tuple[float, ...]
    speedup: float
    empirical_alpha: Optional[float]
    utilization: float
    serial_prefix: float
    dispatch_times: Tuple[float, ...]
    finish_times: Tuple[float, ...]
    trace: Tuple[Tuple[float, str, str], ...] = field(default=(), repr=False)

    def format_trace(self) -> str:
        return "".join(f"{t!r}\t{actor}\t{event}\n" for t, actor, event in self.trace)


def simulate(c: TimelineConfig, trace: bool = False) -> TimelineResult:
    """Run the timeline.  Identical configs give bit-identical results."""
    n = c.n_workers
    if c.clock_hz is None:
        num = float
        tick = lambda t: t  # noqa: E731
    else:
        num = Fraction
        hz = Fraction(c.clock_hz)
        tick = lambda t: Fraction(math.ceil(t * hz)) / hz  # noqa: E731

    events: List[Tuple[object, str, str]] = []
    log = events.append if trace else (lambda e: None)

    t = tick(num(c.t_init_sw))
    log((t, "coordinator", "sw_init_done"))
    t = tick(t + num(c.t_init_os))
    log((t, "coordinator", "os_init_done"))

    t_addr = num(c.t_addr)
    dispatch = [None] * n
    arrive = [None] * n
    for i in range(n):
        t = tick(t + t_addr)
        dispatch[i] = t
        arrive[i] = tick(t + num(c.pd_out[i]))
        log((t, "coordinator", f"dispatch w{i}"))
        if c.dispatch_mode is DispatchMode.BLOCKING:
            t = arrive[i]
    loop_end = t

    finish = [tick(arrive[i] + num(c.t_compute[i])) for i in range(n)]
    returned = [tick(finish[i] + num(c.pd_back[i])) for i in range(n)]
    if trace:
        for i in range(n):
            log((arrive[i], f"w{i}", "task_received"))
            log((finish[i], f"w{i}", "compute_done"))

    t = loop_end
    t_collect = num(c.t_collect)
    for i in sorted(range(n), key=lambda k: (returned[k], k)):
        t = tick(max(t, returned[i]) + t_collect)
        log((t, "coordinator", f"collected w{i}"))
    total = float(t)

    exact_payload = _exact_sum(c.t_compute)
    payload_sum = float(exact_payload)
    idle = tuple(total - (c.pd_out[i] + c.t_compute[i] + c.pd_back[i]) for i in range(n))
    s = float(exact_payload / Fraction(total))
    alpha = None if n < 2 else empirical_alpha_from_speedup(s, n)
    if trace:
        phase = {"task_received": 1, "compute_done": 2}
        events.sort(key=lambda e: (e[0], 3 if e[2].startswith("collected") else phase.get(e[2], 0)))
    return TimelineResult(
        n_workers=n,
        total_time=total,
        payload_time_sum=payload_sum,
        per_worker_idle=idle,
        speedup=s,
        empirical_alpha=alpha,
        utilization=float(exact_payload / (n * Fraction(total))),
        serial_prefix=float(loop_end),
        dispatch_times=tuple(float(x) for x in dispatch),
        finish_times=tuple(float(x) for x in finish),
        trace=tuple((float(e[0]), e[1], e[2]) for e in events),
    )


def _exact_sum(values) -> Fraction:
    # floats are dyadic rationals, so a common power-of-two denominator keeps this integer-only
    ratios = [float(v).as_integer_ratio() for v in values]
    denom = max(q for _, q in ratios)
    return Fraction(sum(p * (denom // q) for p, q in ratios), denom)


def empirical_alpha_from_speedup(s: float, n: int) -> float:
    # unlike core.alpha_from_speedup, a speedup below 1 is reported as a negative alpha
    if n < 2:
        raise core.ModelDomainError("empirical alpha undefined for a single unit")
    return n * (s - 1.0) / ((n - 1.0) * s)


def empirical_alpha(r: TimelineResult, n: Optional[int] = None) -> float:
    """Parallel fraction implied by the measured speedup of a simulated run."""
    n = r.n_workers if n is None else n
    return empirical_alpha_from_speedup(r.speedup, n)


def config_from_spec(m: MachineSpec, w: WorkloadSpec, n: int,
                     dispatch_mode: DispatchMode = DispatchMode.PIPELINED) -> TimelineConfig:
    """Timeline whose pipelined run reproduces the ledger of ``(m, w, n)``.

    The one-time set-up becomes the software init, the per-round application
    and grid-sync terms are lumped into the OS init, the looping time is split
    evenly over the addressing steps, the propagation delay is split evenly
    between the outbound and return paths, and every worker computes for the
    payload time.  Collection is free, since the ledger counts no separate
    collection cost.
    """
    times = serial_times(m, w, n)
    return TimelineConfig(
        n_workers=n,
        t_compute=payload_time(m, w, n),
        t_init_sw=times[Contribution.SW_OS_FIXED],
        t_init_os=times[Contribution.APPLICATION_ITERATION] + times[Contribution.GRID_SYNC],
        t_addr=times[Contribution.LOOPING] / n,
        pd_out=times[Contribution.PROPAGATION] / 2.0,
        pd_back=times[Contribution.PROPAGATION] / 2.0,
        dispatch_mode=dispatch_mode,
    )


@dataclass(frozen=True)
class CrossCheck:
    simulated_efficiency: float
    ledger_efficiency: float
    relative_difference: float
    payload_dominated: bool
    collapse: bool
    tolerance: float = 0.05

    @property
    def within_tolerance(self) -> Optional[bool]:
        """None outside the payload-dominated regime, where no tolerance applies."""
        if not self.payload_dominated:
            return None
        return self.relative_difference <= self.tolerance


def compare_to_analytic(c: TimelineConfig, m: MachineSpec, w: WorkloadSpec) -> CrossCheck:
    """Simulated efficiency of ``c`` against the ledger efficiency of ``(m, w)``.

    The ledger is evaluated at ``c.n_workers`` units; ``c`` is normally built
    with :func:`config_from_spec`.
    """
    n = c.n_workers
    if n < 2:
        raise ValueError("n_workers: the ledger needs at least 2 units")
    r = simulate(c)
    led = ledger(m, w, n)
    serial = sum(led.times[k] for k in CONTRIBUTIONS)
    return CrossCheck(
        simulated_efficiency=r.utilization,
        ledger_efficiency=led.efficiency,
        relative_difference=abs(r.utilization - led.efficiency) / led.efficiency,
        payload_dominated=led.payload_time >= 10.0 * serial,
        collapse=serial > led.payload_time,
    )
