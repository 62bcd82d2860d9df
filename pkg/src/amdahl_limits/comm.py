"""Message counts and serialized communication time per workload class.

HPL talks to every worker once at the start and once at the end.  HPCG
repeats that exchange every iteration.  A layered neural network sends from
every node of a layer to every node of the next.  Brain simulation has every
neuron notify its fan-out of fellow neurons once per grid period.

Queuing is pure serialization: a message occupies the channel for
``t_msg + t_arb`` and nothing else overlaps it on the same channel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Sequence, Union


class WorkloadClass(str, Enum):
    HPL = "hpl"
    HPCG = "hpcg"
    ANN = "ann"
    BRAIN = "brain"


def messages_hpl(m_workers: int) -> int:
    """Dispatch plus collection: two messages per worker."""
    if m_workers < 1:
        raise ValueError(f"m_workers: must be >= 1, got {m_workers!r}")
    return 2 * m_workers


def messages_hpcg(m_workers: int, iterations: int) -> int:
    if m_workers < 1:
        raise ValueError(f"m_workers: must be >= 1, got {m_workers!r}")
    if iterations < 1:
        raise ValueError(f"iterations: must be >= 1, got {iterations!r}")
    return 2 * iterations * m_workers


@dataclass(frozen=True)
class AnnTopology:
    """``n_in`` inputs, ``h`` hidden layers of ``m`` nodes, ``k_out`` outputs."""

    n_in: int
    m: int
    h: int
    k_out: int

    def __post_init__(self):
        for name in ("n_in", "m", "h", "k_out"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name}: must be an integer >= 1, got {v!r}")

    def layer_sizes(self) -> list:
        return [self.n_in] + [self.m] * self.h + [self.k_out]


class AnnMessages(NamedTuple):
    input_to_hidden: int
    between_hidden: int
    hidden_to_output: int

    @property
    def total(self) -> int:
        return self.input_to_hidden + self.between_hidden + self.hidden_to_output

    def stages(self) -> list:
        """Message count on each inter-layer link, input side first."""
        return [self.input_to_hidden, self.between_hidden, self.hidden_to_output]


def messages_ann(t: AnnTopology) -> AnnMessages:
    return AnnMessages(
        input_to_hidden=t.n_in * t.m,
        between_hidden=(t.h - 1) * t.m * t.m,
        hidden_to_output=t.k_out * t.m,
    )


def ann_stage_counts(t: AnnTopology) -> list:
    """Per-link message counts, one entry for each of the ``h + 1`` links."""
    return [t.n_in * t.m] + [t.m * t.m] * (t.h - 1) + [t.k_out * t.m]


def ann_compute_operations(t: AnnTopology) -> int:
    """Node evaluations in the hidden layers: grows with ``m``, not ``m**2``."""
    return t.h * t.m


class BusKind(str, Enum):
    SHARED = "shared"
    PER_LAYER = "per_layer"


@dataclass(frozen=True)
class BusModel:
    """A message passes three queues: the sender's, bus arbitration, the receiver's."""

    kind: BusKind = BusKind.SHARED
    t_msg: float = 1e-6
    t_arb: float = 0.0
    queuing_stages: int = 3

    def __post_init__(self):
        object.__setattr__(self, "kind", BusKind(self.kind))
        if not self.t_msg > 0:
            raise ValueError(f"t_msg: must be > 0, got {self.t_msg!r}")
        if self.t_arb < 0:
            raise ValueError(f"t_arb: must be >= 0, got {self.t_arb!r}")
        if self.queuing_stages != 3:
            raise ValueError("queuing_stages: fixed at 3 (send queue, arbitration, receive queue)")

    @property
    def per_message(self) -> float:
        return self.t_msg + self.t_arb


@dataclass(frozen=True)
class CommProfile:
    message_count: int
    serialized_time: float
    workload_class: WorkloadClass

    def __post_init__(self):
        if self.message_count < 0:
            raise ValueError("message_count: must be >= 0")
        if self.serialized_time < 0:
            raise ValueError("serialized_time: must be >= 0")


def serialized_comm_time(stages: Union[int, Sequence[int]], bus: BusModel) -> float:
    """Seconds to push the messages through the bus.

    ``stages`` is either a single message count or one count per inter-layer
    link.  A shared bus carries every message one after another.  With one bus
    per link the links work side by side, layers step in lockstep, and the
    busiest link sets the pace.
    """
    counts = [stages] if isinstance(stages, int) else list(stages)
    if any(c < 0 for c in counts):
        raise ValueError("message counts must be >= 0")
    if not counts:
        return 0.0
    if bus.kind is BusKind.SHARED:
        return sum(counts) * bus.per_message
    return max(counts) * bus.per_message


def hpl_profile(m_workers: int, bus: BusModel) -> CommProfile:
    count = messages_hpl(m_workers)
    return CommProfile(count, serialized_comm_time(count, bus), WorkloadClass.HPL)


def hpcg_profile(m_workers: int, iterations: int, bus: BusModel) -> CommProfile:
    count = messages_hpcg(m_workers, iterations)
    return CommProfile(count, serialized_comm_time(count, bus), WorkloadClass.HPCG)


def ann_profile(t: AnnTopology, bus: BusModel) -> CommProfile:
    return CommProfile(messages_ann(t).total, serialized_comm_time(ann_stage_counts(t), bus),
                       WorkloadClass.ANN)


DEFAULT_NEURONS = 10**10
BRAIN_CAP_TOLERANCE = 1.1


@dataclass(frozen=True)
class BrainProfile:
    """One grid period of a brain simulation.

    After computing, each neuron waits for ``fanout / reduction`` serialized
    notifications of ``t_comm`` each; ``reduction`` models hierarchic paths
    that cut the fan-out traffic.
    """

    neurons: int
    fanout: int
    grid_period: float
    t_comp: float
    t_comm: float
    reduction: float = 1.0

    def __post_init__(self):
        if self.neurons < 1:
            raise ValueError("neurons: must be >= 1")
        if self.fanout < 0:
            raise ValueError("fanout: must be >= 0")
        for name in ("grid_period", "t_comp", "t_comm"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name}: must be > 0")
        if self.reduction < 1:
            raise ValueError("reduction: must be >= 1")

    @property
    def effective_fanout(self) -> float:
        return self.fanout / self.reduction

    @property
    def message_count(self) -> int:
        return int(round(self.neurons * self.effective_fanout))

    @property
    def wait_time(self) -> float:
        return self.effective_fanout * self.t_comm

    @property
    def efficiency_ratio(self) -> float:
        """Compute share of a grid period once the fan-out wait is added."""
        return self.t_comp / (self.t_comp + self.wait_time)

    @property
    def implied_gain(self) -> float:
        """Performance gain over one unit: ``neurons * efficiency_ratio``."""
        return self.neurons * self.efficiency_ratio

    @property
    def fits_grid_period(self) -> bool:
        return self.t_comp + self.wait_time <= self.grid_period

    def within_cap(self, cap: float) -> bool:
        return self.implied_gain <= cap * BRAIN_CAP_TOLERANCE

    def profile(self) -> CommProfile:
        return CommProfile(self.message_count, self.wait_time, WorkloadClass.BRAIN)


def brain_profile(neurons: int = DEFAULT_NEURONS, fanout: int = 10**4, grid_period: float = 1e-3,
                  t_comp: float = 1e-7, t_comm: float = 1e-5) -> BrainProfile:
    """Brain-simulation communication for one grid period.

    Defaults: 1e10 neurons, fan-out 1e4, 1 ms grid, communication 100 times
    slower than computation.
    """
    return BrainProfile(neurons, fanout, grid_period, t_comp, t_comm)


def hierarchic_reduction(profile: BrainProfile, reduction_factor: float = 100.0) -> BrainProfile:
    if reduction_factor < 1:
        raise ValueError(f"reduction_factor: must be >= 1, got {reduction_factor!r}")
    return replace(profile, reduction=profile.reduction * reduction_factor)


@dataclass(frozen=True)
class RooflineCalibration:
    """Serial fractions that set the gain roofline of each workload class.

    HPL takes the ~1e-7 serial fraction of today's top machines, HPCG sits 200
    times lower in gain, and brain simulation is capped at a gain of 1e4.
    The ANN class is placed between HPCG and brain simulation.
    """

    serial_hpl: float = 1e-7
    hpl_hpcg_ratio: float = 200.0
    brain_cap: float = 1e4
    serial_ann: float = 5e-5

    @property
    def serial_hpcg(self) -> float:
        return self.serial_hpl * self.hpl_hpcg_ratio

    @property
    def serial_brain(self) -> float:
        return 1.0 / self.brain_cap

    def serial(self, cls: WorkloadClass) -> float:
        cls = WorkloadClass(cls)
        return {
            WorkloadClass.HPL: self.serial_hpl,
            WorkloadClass.HPCG: self.serial_hpcg,
            WorkloadClass.ANN: self.serial_ann,
            WorkloadClass.BRAIN: self.serial_brain,
        }[cls]


DEFAULT_CALIBRATION = RooflineCalibration()


def roofline_for_class(cls: Union[WorkloadClass, str],
                       calibration: RooflineCalibration = DEFAULT_CALIBRATION) -> float:
    """Gain roofline ``1/(1 - alpha)`` of a workload class."""
    s = calibration.serial(WorkloadClass(cls))
    if s <= 0:
        return math.inf
    return 1.0 / s
