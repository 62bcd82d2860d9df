"""Command-line front end.

Exit status: 0 on success, 1 on a usage error, 2 on a data or config error.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import comm, core
from .config import ConfigError, RunConfig, load_config
from .dataio import CsvSchemaError, derive, parse_csv, scatter_data
from .ledger import CONTRIBUTIONS, peak_operating_point, sweep
from .modifiers import apply_modifiers
from .report import Table
from .timeline import simulate


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="amdahl-limits",
                     description="Amdahl-law performance limits of parallel machines.",
                     epilog="exit status: 0 success, 1 usage error, 2 data or config error")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--output", choices=("table", "plotdata"), default="table")
        return p

    p = command("model", "speedup, efficiency and gain roofline of one operating point")
    p.add_argument("--alpha", type=float)
    p.add_argument("--serial", type=float, help="1 - alpha, given directly for precision")
    p.add_argument("--n", type=float, required=True)

    p = command("sweep", "payload performance and serial-fraction shares over unit counts")
    p.add_argument("--config", required=True)

    p = command("modify", "apply the config's modifier sections, then sweep")
    p.add_argument("--config", required=True)

    p = command("simulate", "run the dispatch/compute/collect timeline")
    p.add_argument("--config", required=True)
    p.add_argument("--trace", action="store_true", help="append the event trace")

    p = command("comm", "message counts and serialized communication time")
    p.add_argument("--class", dest="cls", required=True, choices=[c.value for c in comm.WorkloadClass])
    p.add_argument("--m", type=_positive_int, help="workers (hpl, hpcg) or hidden-layer width (ann)")
    p.add_argument("--iterations", type=_positive_int, default=1)
    p.add_argument("--n-in", type=_positive_int, default=1)
    p.add_argument("--h", type=_positive_int, default=1)
    p.add_argument("--k", type=_positive_int, default=1)
    p.add_argument("--bus", choices=[b.value for b in comm.BusKind], default="shared")
    p.add_argument("--t-msg", type=float, default=1e-6)
    p.add_argument("--t-arb", type=float, default=0.0)
    p.add_argument("--neurons", type=_positive_int, default=comm.DEFAULT_NEURONS)
    p.add_argument("--fanout", type=int, default=10**4)
    p.add_argument("--grid-period", type=float, default=1e-3)
    p.add_argument("--t-comp", type=float, default=1e-7)
    p.add_argument("--t-comm", type=float, default=1e-5)
    p.add_argument("--reduction", type=float, default=1.0)

    p = command("ingest", "derived metrics and scatter data from a list CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--units", default="TFlop/s")

    command("roofline", "gain rooflines of the workload classes")
    return parser


def _model(args) -> List[Table]:
    if (args.alpha is None) == (args.serial is None):
        raise UsageError("model: give exactly one of --alpha and --serial")
    point = (core.AmdahlPoint(args.alpha, args.n) if args.serial is None
             else core.AmdahlPoint.from_serial(args.serial, args.n))
    gain = core.perf_gain_limit(point.alpha, serial=point.serial) if point.serial > 0 else float("inf")
    t = Table(["alpha", "one_minus_alpha", "n", "speedup", "efficiency", "gain_limit"])
    t.add(point.alpha, point.serial, args.n, point.speedup(), point.efficiency(), gain)
    return [t]


def _sweep_table(cfg: RunConfig, baseline: Optional[RunConfig] = None) -> Table:
    m, w = cfg.machine, cfg.workload
    columns = ["n", "nominal", "r_max", "efficiency", "one_minus_alpha"]
    columns += [f"share_{c.value}" for c in CONTRIBUTIONS] + ["beyond_model"]
    if baseline is not None:
        columns += ["r_max_baseline", "gain_ratio"]
        base = dict((entry.n, entry) for _, entry in sweep(baseline.machine, w, cfg.n_values))
    t = Table(columns)
    for nominal, entry in sweep(m, w, cfg.n_values):
        row = [entry.n, nominal, entry.r_max, entry.efficiency, entry.one_minus_alpha_total]
        row += [entry.shares[c] for c in CONTRIBUTIONS] + [entry.beyond_model]
        if baseline is not None:
            b = base[entry.n].r_max
            row += [b, entry.r_max / b]
        t.add(*row)
    if len(cfg.n_values) >= 3:
        peak = peak_operating_point(m, w, cfg.n_values)
        note = f"peak n={peak.n} nominal={peak.nominal:.10g} r_max={peak.r_max:.10g}"
        if peak.warning:
            note += f" ({peak.warning})"
        t.notes.append(note)
    return t


def _sweep(args) -> List[Table]:
    return [_sweep_table(load_config(args.config))]


def _modify(args) -> List[Table]:
    cfg = load_config(args.config)
    m, w = apply_modifiers(cfg.machine, cfg.workload, cfg.modifiers)
    modified = RunConfig(machine=m, workload=w, n_values=cfg.n_values)
    return [_sweep_table(modified, baseline=cfg)]


def _simulate(args) -> List[Table]:
    cfg = load_config(args.config)
    if cfg.timeline is None:
        raise ConfigError("simulate: config has no [timeline] section")
    r = simulate(cfg.timeline, trace=args.trace)
    summary = Table(["total_time", "payload_time_sum", "speedup", "empirical_alpha",
                     "utilization", "serial_prefix"])
    summary.add(r.total_time, r.payload_time_sum, r.speedup, r.empirical_alpha,
                r.utilization, r.serial_prefix)
    if r.empirical_alpha is None:
        summary.notes.append("empirical_alpha undefined for a single worker")
    workers = Table(["worker", "dispatch", "finish", "idle"])
    for i in range(r.n_workers):
        workers.add(i, r.dispatch_times[i], r.finish_times[i], r.per_worker_idle[i])
    tables = [summary, workers]
    if args.trace:
        trace = Table(["time", "actor", "event"])
        for row in r.trace:
            trace.add(*row)
        tables.append(trace)
    return tables


def _comm(args) -> List[Table]:
    cls = comm.WorkloadClass(args.cls)
    if cls is comm.WorkloadClass.BRAIN:
        b = comm.brain_profile(args.neurons, args.fanout, args.grid_period, args.t_comp, args.t_comm)
        if args.reduction != 1.0:
            b = comm.hierarchic_reduction(b, args.reduction)
        t = Table(["class", "message_count", "serialized_time", "efficiency_ratio",
                   "implied_gain", "fits_grid_period"])
        t.add(cls.value, b.message_count, b.wait_time, b.efficiency_ratio, b.implied_gain,
              b.fits_grid_period)
        return [t]
    if args.m is None:
        raise UsageError(f"comm: --m is required for class {cls.value}")
    bus = comm.BusModel(args.bus, args.t_msg, args.t_arb)
    if cls is comm.WorkloadClass.HPL:
        prof = comm.hpl_profile(args.m, bus)
    elif cls is comm.WorkloadClass.HPCG:
        prof = comm.hpcg_profile(args.m, args.iterations, bus)
    else:
        topo = comm.AnnTopology(args.n_in, args.m, args.h, args.k)
        prof = comm.ann_profile(topo, bus)
        counts = comm.messages_ann(topo)
        t = Table(["class", "message_count", "serialized_time", "input_to_hidden",
                   "between_hidden", "hidden_to_output"])
        t.add(cls.value, prof.message_count, prof.serialized_time, *counts)
        return [t]
    t = Table(["class", "message_count", "serialized_time"])
    t.add(cls.value, prof.message_count, prof.serialized_time)
    return [t]


def _ingest(args) -> List[Table]:
    records = parse_csv(args.csv, units=args.units)
    for row_number, reason in records.rejected:
        print(f"{args.csv}:{row_number}: rejected: {reason}", file=sys.stderr)
    metrics = Table(["rank", "name", "cores", "e_hpl", "one_minus_alpha_hpl", "gain_hpl",
                     "e_hpcg", "hpl_hpcg_ratio"])
    for r in records:
        d = derive(r)
        metrics.add(r.rank, r.name, r.cores, d.e_hpl, d.one_minus_alpha_hpl, d.gain_hpl,
                    d.e_hpcg, d.hpl_hpcg_ratio)
    tables = [metrics]
    if records:
        scatter = Table(["cores", "e_hpl", "e_hpcg", "one_minus_alpha"])
        for row in scatter_data(records):
            scatter.add(row.cores, row.e_hpl, row.e_hpcg, row.one_minus_alpha)
        tables.append(scatter)
    return tables


def _roofline(args) -> List[Table]:
    t = Table(["class", "one_minus_alpha", "gain_roofline"])
    for cls in (comm.WorkloadClass.HPL, comm.WorkloadClass.HPCG, comm.WorkloadClass.ANN,
                comm.WorkloadClass.BRAIN):
        t.add(cls.value, comm.DEFAULT_CALIBRATION.serial(cls), comm.roofline_for_class(cls))
    return [t]


COMMANDS = {
    "model": _model, "sweep": _sweep, "modify": _modify, "simulate": _simulate,
    "comm": _comm, "ingest": _ingest, "roofline": _roofline,
}


def run(argv: Optional[List[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        tables = COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (ConfigError, CsvSchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out.write("\n".join(t.render(args.output) for t in tables))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
