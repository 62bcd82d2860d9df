"""Machine and workload transformers.

Each modifier returns a new spec; the originals are never touched.
Modifiers compose in the order they are listed, see :func:`apply_modifiers`.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Tuple, Union

from .ledger import MachineSpec, WorkloadKind, WorkloadSpec, ledger


@dataclass(frozen=True)
class Accelerator:
    """A GPGPU-style accelerator.

    ``t_copy`` is paid once per dispatched unit for copying data between
    address spaces and lands in the serial addressing cost.  With
    ``scale_recompute`` the coordinator's serial recompute also speeds up.
    """

    compute_speedup: float = 5.0
    t_copy: float = 4e-6
    scale_recompute: bool = True

    def __post_init__(self):
        if not self.compute_speedup > 1:
            raise ValueError(f"compute_speedup: must be > 1, got {self.compute_speedup!r}")
        if self.t_copy < 0:
            raise ValueError(f"t_copy: must be >= 0, got {self.t_copy!r}")

    @classmethod
    def default_for(cls, m: MachineSpec) -> "Accelerator":
        """Default calibration: 5x compute, copy cost of four addressing steps."""
        return cls(compute_speedup=5.0, t_copy=4.0 * m.t_addr)


@dataclass(frozen=True)
class PrecisionMode:
    """Reduced-precision arithmetic; communication is unaffected."""

    compute_scale: float = 0.25

    def __post_init__(self):
        if not 0 < self.compute_scale <= 1:
            raise ValueError(f"compute_scale: must lie in (0, 1], got {self.compute_scale!r}")

    @property
    def comm_scale(self) -> float:
        return 1.0


@dataclass(frozen=True)
class CooperativeTransfer:
    """Direct core-to-core transfer that bypasses the global bus."""

    msg_scale: float = 0.1

    def __post_init__(self):
        if not 0 < self.msg_scale <= 1:
            raise ValueError(f"msg_scale: must lie in (0, 1], got {self.msg_scale!r}")


Modifier = Union[Accelerator, PrecisionMode, CooperativeTransfer]


def apply_accelerator(m: MachineSpec, a: Accelerator) -> MachineSpec:
    scale = m.serial_compute_scale / a.compute_speedup if a.scale_recompute else m.serial_compute_scale
    return replace(m, p_single=m.p_single * a.compute_speedup, t_addr=m.t_addr + a.t_copy,
                   serial_compute_scale=scale)


def mixed_precision_speedup(t_compute: float, t_comm: float, compute_scale: float) -> float:
    """Whole-run speedup when only the computing part gets faster."""
    if t_compute < 0 or t_comm < 0 or t_compute + t_comm == 0:
        raise ValueError("need non-negative times with a positive sum")
    return (t_compute + t_comm) / (t_compute * compute_scale + t_comm)


class PrecisionResult(NamedTuple):
    machine: MachineSpec
    workload: WorkloadSpec
    predicted_total_speedup: float


def apply_precision(m: MachineSpec, w: WorkloadSpec, p: PrecisionMode, n: int) -> PrecisionResult:
    """Switch to reduced precision and predict the run-time speedup at ``n`` units.

    The computing time of the run is the payload plus the serial recompute;
    every other serial term counts as communication.
    """
    m2 = _reduced_precision(m, p)
    before = ledger(m, w, n)
    t_comp = before.payload_time + _recompute_time(m, w, n)
    t_comm = before.total_time - t_comp
    return PrecisionResult(m2, w, mixed_precision_speedup(t_comp, t_comm, p.compute_scale))


def _reduced_precision(m: MachineSpec, p: PrecisionMode) -> MachineSpec:
    return replace(m, p_single=m.p_single / p.compute_scale,
                   serial_compute_scale=m.serial_compute_scale * p.compute_scale)


def _recompute_time(m: MachineSpec, w: WorkloadSpec, n: int) -> float:
    if w.kind is not WorkloadKind.HPCG:
        return 0.0
    return w.iterations * w.recompute_fraction * 2.0 * n * m.t_msg * m.serial_compute_scale


def compute_power_proxy(compute_operations: float, p: PrecisionMode) -> float:
    """Relative computing energy: operation count weighted by the compute scale."""
    return compute_operations * p.compute_scale


def apply_cooperative(m: MachineSpec, c: CooperativeTransfer) -> MachineSpec:
    """Scale message and per-core addressing times by ``msg_scale``.

    Addressing a core is itself a transfer over the interconnect, so direct
    transfer cuts the looping cost as well.
    """
    return replace(m, t_msg=m.t_msg * c.msg_scale, t_addr=m.t_addr * c.msg_scale)


def hpl_ai_equivalence(r_mixed: float, r_dp: float) -> float:
    if not (r_mixed > 0 and r_dp > 0):
        raise ValueError("both performance figures must be > 0")
    return r_mixed / r_dp


def apply_modifiers(m: MachineSpec, w: WorkloadSpec,
                    modifiers: Iterable[Modifier]) -> Tuple[MachineSpec, WorkloadSpec]:
    """Apply the modifiers in the order given."""
    for mod in modifiers:
        if isinstance(mod, Accelerator):
            m = apply_accelerator(m, mod)
        elif isinstance(mod, PrecisionMode):
            m = _reduced_precision(m, mod)
        elif isinstance(mod, CooperativeTransfer):
            m = apply_cooperative(m, mod)
        else:
            raise TypeError(f"unknown modifier {mod!r}")
    return m, w


def gain_ratio(base: MachineSpec, modified: MachineSpec, w: WorkloadSpec, n: int) -> float:
    """Payload performance of ``modified`` over ``base`` at ``n`` units."""
    return ledger(modified, w, n).r_max / ledger(base, w, n).r_max


# core counts spanned by the ranked machines the accelerator calibration mimics
ACCELERATOR_N_RANGE = (1_000, 7_000_000)
