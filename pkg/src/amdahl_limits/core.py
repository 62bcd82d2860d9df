"""Amdahl algebra: speedup, efficiency, empirical parallelization and rooflines.

All functions accept scalars or numpy arrays for ``alpha`` and ``n``; ``n`` is
treated as a real number so that smooth sweeps can be plotted, although it
denotes a count of processing units.

Near the interesting regime of large machines the serial fraction ``1 - alpha``
is around 1e-7 or smaller, and forming it by subtraction throws away most of
its significant digits.  Every function therefore takes an optional ``serial``
argument carrying ``1 - alpha`` explicitly; when given, it is used in place of
``1 - alpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


class ModelDomainError(ValueError):
    """An argument lies outside the domain where the Amdahl model is defined."""


@dataclass(frozen=True)
class AmdahlPoint:
    """A (parallel fraction, unit count) operating point.

    ``serial`` is ``1 - alpha``.  Build points in the 1e-8 regime with
    :meth:`from_serial` so the small quantity is never formed by subtraction.
    """

    alpha: float
    n: float
    serial: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ModelDomainError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        if self.n < 1:
            raise ModelDomainError(f"n must be >= 1, got {self.n!r}")
        if self.serial is None:
            object.__setattr__(self, "serial", 1.0 - self.alpha)
        elif not 0.0 <= self.serial <= 1.0:
            raise ModelDomainError(f"serial fraction must lie in [0, 1], got {self.serial!r}")

    @classmethod
    def from_serial(cls, serial: float, n: float) -> "AmdahlPoint":
        return cls(alpha=1.0 - serial, n=n, serial=serial)

    def speedup(self) -> float:
        return float(speedup(self.alpha, self.n, serial=self.serial))

    def efficiency(self) -> float:
        return float(efficiency(self.alpha, self.n, serial=self.serial))


def _serial(alpha, serial):
    return 1.0 - np.asarray(alpha, dtype=float) if serial is None else np.asarray(serial, dtype=float)


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def efficiency(alpha: ArrayLike, n: ArrayLike, serial: Optional[ArrayLike] = None) -> ArrayLike:
    """E = 1 / (N(1 - alpha) + alpha), identical in meaning to R_Max / R_Peak."""
    s = _serial(alpha, serial)
    n = np.asarray(n, dtype=float)
    a = np.asarray(alpha, dtype=float)
    return _scalar(1.0 / (n * s + a))


def speedup(alpha: ArrayLike, n: ArrayLike, serial: Optional[ArrayLike] = None) -> ArrayLike:
    """S = N / (N(1 - alpha) + alpha).

    Computed as ``efficiency * N`` so that the two agree bit for bit.
    """
    return _scalar(np.asarray(efficiency(alpha, n, serial)) * np.asarray(n, dtype=float))


def alpha_from_speedup(s: float, n: float) -> float:
    """Empirical parallel fraction from a measured speedup on ``n`` units.

    Speedups below 1 are accepted and give a negative alpha, which is how a
    run slower than the single-unit baseline shows up.
    """
    if n <= 1:
        raise ModelDomainError("empirical alpha undefined for a single unit")
    if s > n * (1.0 + 1e-12):
        raise ModelDomainError("super-linear speedup outside model")
    if s <= 0:
        raise ModelDomainError(f"speedup must be positive, got {s!r}")
    return n * (s - 1.0) / ((n - 1.0) * s)


def serial_from_efficiency(e: float, n: float) -> float:
    """``1 - alpha`` from an efficiency, as (1/E - 1)/(N - 1) with no cancellation."""
    if n <= 1:
        raise ModelDomainError("empirical alpha undefined for a single unit")
    if not 0.0 < e <= 1.0:
        raise ModelDomainError(f"efficiency must lie in (0, 1], got {e!r}")
    if e < 1.0 / n * (1.0 - 1e-12):
        raise ModelDomainError("efficiency below serial floor")
    return (1.0 / e - 1.0) / (n - 1.0)


def alpha_from_efficiency(e: float, n: float) -> float:
    if n <= 1:
        raise ModelDomainError("empirical alpha undefined for a single unit")
    if not 0.0 < e <= 1.0:
        raise ModelDomainError(f"efficiency must lie in (0, 1], got {e!r}")
    if e < 1.0 / n * (1.0 - 1e-12):
        raise ModelDomainError("efficiency below serial floor")
    return (n - 1.0 / e) / (n - 1.0)


class PerfKind(Enum):
    NOMINAL = "nominal"
    PAYLOAD = "payload"


@dataclass(frozen=True)
class PerfFigure:
    value: float
    kind: PerfKind

    def __post_init__(self):
        if self.value < 0:
            raise ModelDomainError(f"performance must be >= 0, got {self.value!r}")


def nominal_performance(n: float, p_single: float) -> PerfFigure:
    return PerfFigure(n * p_single, PerfKind.NOMINAL)


def perf_total(n: ArrayLike, p_single: float, alpha: ArrayLike,
               serial: Optional[ArrayLike] = None):
    """Payload performance of ``n`` units with the Amdahl correction term.

    Returns a :class:`PerfFigure` for scalar input, a plain array for array
    input.  For ``alpha == 1`` this is classic addition, ``n * p_single``.
    """
    if p_single <= 0:
        raise ModelDomainError(f"p_single must be > 0, got {p_single!r}")
    value = np.asarray(speedup(alpha, n, serial)) * p_single
    if value.ndim == 0:
        return PerfFigure(float(value), PerfKind.PAYLOAD)
    return value


def perf_gain_limit(alpha: float, serial: Optional[float] = None) -> float:
    """Asymptotic roofline 1/(1 - alpha) of the performance gain."""
    s = 1.0 - alpha if serial is None else serial
    if s <= 0:
        raise ModelDomainError("unbounded gain")
    return 1.0 / s


@dataclass(frozen=True)
class RelativisticParams:
    t: float
    g: float
    c: float = 299_792_458.0
    n_optical: float = 1.0

    def __post_init__(self):
        if self.t < 0:
            raise ModelDomainError("t must be >= 0")
        if self.g <= 0 or self.c <= 0:
            raise ModelDomainError("g and c must be > 0")
        if self.n_optical < 1:
            raise ModelDomainError("n_optical must be >= 1")

    @property
    def limit(self) -> float:
        return self.c / self.n_optical


def relativistic_speed(p: RelativisticParams) -> float:
    """Speed under constant acceleration with the relativistic correction term.

    Only an illustration for the performance correction: both curves stay
    near the classic line until they approach their limit, then saturate.
    """
    classic = p.t * p.g
    x = classic / p.limit
    if math.isinf(x):
        return p.limit
    return p.limit * x / math.hypot(1.0, x)
