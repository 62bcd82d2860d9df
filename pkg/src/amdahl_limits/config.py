"""INI-style run configuration.

Sections and keys (every key optional, defaults are the fictive machine)::

    [machine]
    p_single = 1e9           # flop/s per core
    clock_hz = 1e9
    t_fix = 10               # seconds
    t_addr = 1e-6
    t_msg = 1e-6
    prop_coeff = 1e-8
    prop_exponent = 0.3333333333333333

    [workload]
    kind = hpl               # hpl | hpcg | grid
    total_flops = 1e18
    scaling = strong         # strong | fixed_time
    iterations = 10          # hpcg
    recompute_fraction = 0.1 # hpcg
    grid_period_cycles = 5000   # grid; or grid_period in seconds
    periods = 100            # grid
    per_period_serial_msgs = 1  # grid

    [sweep]
    n_min = 2
    n_max = 1e10
    points_per_decade = 10
    # or an explicit list: n_values = 2, 4, 8

    [timeline]
    n_workers = 4
    t_compute = 1.0, 1.0, 1.0, 1.0   # one value per worker, or one for all
    t_init_sw = 0
    t_init_os = 0
    t_addr = 0.5
    pd_out = 0
    pd_back = 0
    t_collect = 0
    dispatch_mode = pipelined        # pipelined | blocking
    clock_hz =                       # empty: no time quantum

    [modifier:accelerator]
    compute_speedup = 5
    t_copy = 4e-6
    scale_recompute = yes

    [modifier:precision]
    compute_scale = 0.25

    [modifier:cooperative]
    msg_scale = 0.1

Modifier sections apply in file order.  A second modifier of the same kind
takes a suffix: ``[modifier:cooperative#2]``.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import List, Optional

from .ledger import MachineSpec, WorkloadKind, WorkloadSpec, log_grid
from .modifiers import Accelerator, CooperativeTransfer, Modifier, PrecisionMode
from .timeline import TimelineConfig


class ConfigError(ValueError):
    """A configuration value is missing, malformed or violates an invariant."""


@dataclass
class RunConfig:
    machine: MachineSpec = field(default_factory=MachineSpec)
    workload: WorkloadSpec = field(default_factory=WorkloadSpec)
    n_values: List[int] = field(default_factory=lambda: log_grid(2, 1e10, 10))
    timeline: Optional[TimelineConfig] = None
    modifiers: List[Modifier] = field(default_factory=list)


def _float(section, key, where):
    raw = section.get(key)
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key}: not a number: {raw!r}") from None


def _int(section, key, where):
    value = _float(section, key, where)
    if value != int(value):
        raise ConfigError(f"{where}.{key}: not an integer: {section.get(key)!r}")
    return int(value)


def _floats(section, key, where):
    raw = section.get(key, "")
    parts = [p.strip() for p in raw.replace("\n", ",").split(",") if p.strip()]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"{where}.{key}: not a list of numbers: {raw!r}") from None
    if not values:
        raise ConfigError(f"{where}.{key}: empty list")
    return values[0] if len(values) == 1 else values


def _build(cls, where, **kw):
    try:
        return cls(**kw)
    except ValueError as exc:
        raise ConfigError(f"{where}.{exc}") from None


def _check_keys(section, allowed, where):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(sorted(unknown))}")


MACHINE_KEYS = ("p_single", "clock_hz", "t_fix", "t_addr", "t_msg", "prop_coeff", "prop_exponent")
WORKLOAD_FLOATS = ("total_flops", "recompute_fraction", "grid_period")
WORKLOAD_INTS = ("iterations", "periods", "per_period_serial_msgs")


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), default_section="__none__")
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    cfg = RunConfig()
    if cp.has_section("machine"):
        sec = cp["machine"]
        _check_keys(sec, MACHINE_KEYS, "machine")
        cfg.machine = _build(MachineSpec, "machine", **{k: _float(sec, k, "machine") for k in sec})

    if cp.has_section("workload"):
        sec = cp["workload"]
        _check_keys(sec, WORKLOAD_FLOATS + WORKLOAD_INTS + ("kind", "scaling", "grid_period_cycles"),
                    "workload")
        kw = {}
        for k in sec:
            if k in WORKLOAD_FLOATS:
                kw[k] = _float(sec, k, "workload")
            elif k in WORKLOAD_INTS:
                kw[k] = _int(sec, k, "workload")
            elif k in ("kind", "scaling"):
                kw[k] = sec[k].strip().lower()
        if "grid_period_cycles" in sec:
            kw["grid_period"] = _float(sec, "grid_period_cycles", "workload") / cfg.machine.clock_hz
        kind = kw.get("kind", "hpl")
        if kind not in {k.value for k in WorkloadKind}:
            raise ConfigError(f"workload.kind: expected hpl, hpcg or grid, got {kind!r}")
        if kind == "hpcg":
            kw.setdefault("iterations", 10)
        if kind == "grid":
            kw.setdefault("periods", 100)
            kw.setdefault("per_period_serial_msgs", 1)
        if kw.get("scaling", "strong") not in ("strong", "fixed_time"):
            raise ConfigError(f"workload.scaling: expected strong or fixed_time, got {kw['scaling']!r}")
        cfg.workload = _build(WorkloadSpec, "workload", **kw)

    if cp.has_section("sweep"):
        sec = cp["sweep"]
        _check_keys(sec, ("n_min", "n_max", "points_per_decade", "n_values"), "sweep")
        if "n_values" in sec:
            values = _floats(sec, "n_values", "sweep")
            values = values if isinstance(values, list) else [values]
            if any(v < 2 or v != int(v) for v in values):
                raise ConfigError("sweep.n_values: every entry must be an integer >= 2")
            cfg.n_values = [int(v) for v in values]
        else:
            n_min = _float(sec, "n_min", "sweep") if "n_min" in sec else 2
            n_max = _float(sec, "n_max", "sweep") if "n_max" in sec else 1e10
            ppd = _int(sec, "points_per_decade", "sweep") if "points_per_decade" in sec else 10
            try:
                cfg.n_values = log_grid(n_min, n_max, ppd)
            except ValueError as exc:
                raise ConfigError(f"sweep: {exc}") from None

    if cp.has_section("timeline"):
        cfg.timeline = _timeline(cp["timeline"])

    for name in cp.sections():
        if name.startswith("modifier:"):
            cfg.modifiers.append(_modifier(name, cp[name]))
        elif name not in ("machine", "workload", "sweep", "timeline"):
            raise ConfigError(f"unknown section [{name}]")
    return cfg


def _timeline(sec) -> TimelineConfig:
    where = "timeline"
    _check_keys(sec, ("n_workers", "t_compute", "t_init_sw", "t_init_os", "t_addr", "pd_out",
                      "pd_back", "t_collect", "dispatch_mode", "clock_hz"), where)
    if "n_workers" not in sec or "t_compute" not in sec:
        raise ConfigError("timeline: n_workers and t_compute are required")
    kw = {"n_workers": _int(sec, "n_workers", where)}
    for k in ("t_compute", "pd_out", "pd_back"):
        if k in sec:
            kw[k] = _floats(sec, k, where)
    for k in ("t_init_sw", "t_init_os", "t_addr", "t_collect"):
        if k in sec:
            kw[k] = _float(sec, k, where)
    if sec.get("clock_hz", "").strip():
        kw["clock_hz"] = _float(sec, "clock_hz", where)
    if "dispatch_mode" in sec:
        mode = sec["dispatch_mode"].strip().lower()
        if mode not in ("pipelined", "blocking"):
            raise ConfigError(f"timeline.dispatch_mode: expected pipelined or blocking, got {mode!r}")
        kw["dispatch_mode"] = mode
    return _build(TimelineConfig, where, **kw)


def _modifier(name, sec) -> Modifier:
    kind = name.split(":", 1)[1].split("#", 1)[0].strip()
    if kind == "accelerator":
        _check_keys(sec, ("compute_speedup", "t_copy", "scale_recompute"), name)
        kw = {k: _float(sec, k, name) for k in ("compute_speedup", "t_copy") if k in sec}
        if "scale_recompute" in sec:
            try:
                kw["scale_recompute"] = sec.getboolean("scale_recompute")
            except ValueError:
                raise ConfigError(f"{name}.scale_recompute: expected yes/no") from None
        return _build(Accelerator, name, **kw)
    if kind == "precision":
        _check_keys(sec, ("compute_scale",), name)
        return _build(PrecisionMode, name, **{k: _float(sec, k, name) for k in sec})
    if kind == "cooperative":
        _check_keys(sec, ("msg_scale",), name)
        return _build(CooperativeTransfer, name, **{k: _float(sec, k, name) for k in sec})
    raise ConfigError(f"[{name}]: unknown modifier kind {kind!r}")


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
