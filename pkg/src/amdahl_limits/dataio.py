"""Supercomputer-list CSV ingestion and derived efficiency metrics.

The reader is forgiving about headers (case, spacing, unit suffixes and a
table of aliases used by list exports over the years) and strict about the
rows: a row that breaks an invariant is rejected with its row number while
the remaining rows are still read.

Performance columns are in ``units`` (Tflop/s by default) unless the header
carries its own unit, e.g. ``Rmax [GFlop/s]``.  Values are converted to flop/s
through :mod:`decimal`, so a serialize/parse round trip is exact.
"""
from __future__ import annotations

import csv
import io
import os
import re
from importlib import resources
from dataclasses import dataclass, fields
from decimal import Decimal, InvalidOperation
from typing import Dict, Iterable, List, Optional, Tuple, Union

from . import core

UNIT_EXPONENTS = {
    "flop/s": 0, "kflop/s": 3, "mflop/s": 6, "gflop/s": 9,
    "tflop/s": 12, "pflop/s": 15, "eflop/s": 18,
}

HEADER_ALIASES = {
    "rank": "rank", "#": "rank", "list rank": "rank",
    "name": "name", "system": "name", "computer": "name", "system name": "name",
    "cores": "cores", "total cores": "cores", "totalcores": "cores", "number of cores": "cores",
    "rmax": "rmax", "r max": "rmax", "r_max": "rmax",
    "rpeak": "rpeak", "r peak": "rpeak", "r_peak": "rpeak",
    "hpcg": "hpcg", "hpcg result": "hpcg",
    "year": "year",
    "accelerated": "accelerated", "accelerator": "accelerated",
    "accelerator/co-processor": "accelerated",
}
MANDATORY = ("rank", "name", "cores", "rmax", "rpeak")
PERF_COLUMNS = ("rmax", "rpeak", "hpcg")
COLUMN_ORDER = ("rank", "name", "cores", "rmax", "rpeak", "hpcg", "year", "accelerated")
FALSY = {"0", "no", "false", "none", "n/a", "-"}


def sample_list_path() -> str:
    """Path of the bundled synthetic 25-machine list (not real list data)."""
    return str(resources.files("amdahl_limits") / "data" / "top25_synthetic.csv")


class CsvSchemaError(ValueError):
    """The file cannot be read at all (missing header or mandatory column)."""


class RowError(ValueError):
    pass


@dataclass(frozen=True)
class MachineRecord:
    """One list entry; performance figures in flop/s."""

    rank: int
    name: str
    cores: int
    rmax: float
    rpeak: float
    hpcg: Optional[float] = None
    year: Optional[int] = None
    accelerated: Optional[bool] = None

    def __post_init__(self):
        if self.rank < 1:
            raise RowError(f"rank must be >= 1, got {self.rank}")
        if self.cores < 1:
            raise RowError(f"cores must be >= 1, got {self.cores}")
        if not (self.rmax > 0 and self.rpeak > 0):
            raise RowError("rmax and rpeak must be > 0")
        if self.rmax > self.rpeak:
            raise RowError("inconsistent benchmark figures: rmax > rpeak")
        if self.hpcg is not None:
            if not self.hpcg > 0:
                raise RowError("hpcg must be > 0 when present")
            if self.hpcg > self.rmax:
                raise RowError("inconsistent benchmark figures: hpcg > rmax")


class Records(list):
    """Parsed records; ``rejected`` holds ``(row_number, reason)`` pairs."""

    def __init__(self, records=(), rejected=()):
        super().__init__(records)
        self.rejected: List[Tuple[int, str]] = list(rejected)


def _normalize_header(raw: str) -> Tuple[str, Optional[str]]:
    text = raw.strip().lower()
    unit = None
    m = re.search(r"[\[(]\s*([a-z]*flop/s)\s*[\])]", text)
    if m:
        unit = m.group(1)
        text = (text[:m.start()] + text[m.end():]).strip()
    text = re.sub(r"[\s_]+", " ", text).strip()
    return HEADER_ALIASES.get(text, HEADER_ALIASES.get(text.replace(" ", ""), text)), unit


def _exponent(unit: str) -> int:
    try:
        return UNIT_EXPONENTS[unit.strip().lower()]
    except KeyError:
        raise CsvSchemaError(f"unknown performance unit {unit!r}") from None


def _to_flops(text: str, exponent: int) -> float:
    try:
        return float(Decimal(text.strip().replace(",", "")).scaleb(exponent))
    except InvalidOperation:
        raise RowError(f"not a number: {text!r}") from None


def _from_flops(value: float, exponent: int) -> str:
    short = repr(float(Decimal(value).scaleb(-exponent)))
    if float(Decimal(short).scaleb(exponent)) == value:
        return short
    return format(Decimal(value).scaleb(-exponent), "f")


def _to_int(text: str, column: str) -> int:
    try:
        return int(Decimal(text.strip().replace(",", "")))
    except (InvalidOperation, ValueError):
        raise RowError(f"{column}: not an integer: {text!r}") from None


def _open(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, newline="", encoding="utf-8")
    return None


def parse_csv(source, units: str = "TFlop/s") -> Records:
    """Read list rows from a path or an open text stream."""
    fh = _open(source)
    try:
        return _parse(fh if fh is not None else source, _exponent(units))
    finally:
        if fh is not None:
            fh.close()


def parse_csv_text(text: str, units: str = "TFlop/s") -> Records:
    return parse_csv(io.StringIO(text), units)


def _is_comment(line: str) -> bool:
    # "#" alone in the first cell is the rank column alias, not a comment
    text = line.lstrip()
    return text.startswith("#") and not text[1:].lstrip().startswith(",")


def _parse(stream: Iterable[str], default_exp: int) -> Records:
    # keep physical line numbers so rejections point at the right line of the file
    kept = [(no, line) for no, line in enumerate(stream, start=1) if not _is_comment(line)]
    reader = csv.reader(line for _, line in kept)
    header = next(reader, None)
    if not header or not any(h.strip() for h in header):
        raise CsvSchemaError("missing header row")
    columns: Dict[str, Tuple[int, int]] = {}
    for i, raw in enumerate(header):
        key, unit = _normalize_header(raw)
        if key in COLUMN_ORDER and key not in columns:
            columns[key] = (i, _exponent(unit) if unit else default_exp)
    for name in MANDATORY:
        if name not in columns:
            raise CsvSchemaError(f"missing mandatory column: {name}")

    out = Records()
    for row in reader:
        if not any(cell.strip() for cell in row):
            continue
        row_number = kept[reader.line_num - 1][0]
        try:
            out.append(_record(row, columns))
        except RowError as exc:
            out.rejected.append((row_number, str(exc)))
    return out


def _record(row: List[str], columns: Dict[str, Tuple[int, int]]) -> MachineRecord:
    def cell(key):
        if key not in columns:
            return ""
        i = columns[key][0]
        return row[i].strip() if i < len(row) else ""

    values = {}
    for key in MANDATORY:
        if not cell(key):
            raise RowError(f"{key}: empty mandatory field")
    values["rank"] = _to_int(cell("rank"), "rank")
    values["name"] = cell("name")
    values["cores"] = _to_int(cell("cores"), "cores")
    for key in PERF_COLUMNS:
        if cell(key):
            values[key] = _to_flops(cell(key), columns[key][1])
    if cell("year"):
        values["year"] = _to_int(cell("year"), "year")
    if cell("accelerated"):
        values["accelerated"] = cell("accelerated").lower() not in FALSY
    return MachineRecord(**values)


def to_csv(records: Iterable[MachineRecord], units: str = "TFlop/s") -> str:
    """Write records in the dialect :func:`parse_csv` reads back unchanged."""
    exp = _exponent(units)
    unit_label = next(k for k, v in UNIT_EXPONENTS.items() if v == exp)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"{c} [{unit_label}]" if c in PERF_COLUMNS else c for c in COLUMN_ORDER])
    for r in records:
        writer.writerow([
            r.rank, r.name, r.cores,
            _from_flops(r.rmax, exp), _from_flops(r.rpeak, exp),
            "" if r.hpcg is None else _from_flops(r.hpcg, exp),
            "" if r.year is None else r.year,
            "" if r.accelerated is None else ("yes" if r.accelerated else "no"),
        ])
    return buf.getvalue()


@dataclass(frozen=True)
class DerivedMetrics:
    e_hpl: float
    one_minus_alpha_hpl: Optional[float]
    alpha_hpl: Optional[float]
    gain_hpl: float
    e_hpcg: Optional[float] = None
    alpha_hpcg: Optional[float] = None
    one_minus_alpha_hpcg: Optional[float] = None
    hpl_hpcg_ratio: Optional[float] = None
    note: str = ""


def derive(r: MachineRecord) -> DerivedMetrics:
    e = r.rmax / r.rpeak
    kw = {}
    notes = []
    if r.cores < 2:
        notes.append("alpha undefined for a single unit")
        oma = alpha = None
    else:
        oma = core.serial_from_efficiency(e, r.cores)
        alpha = core.alpha_from_efficiency(e, r.cores)
    if r.hpcg is not None:
        e_hpcg = r.hpcg / r.rpeak
        kw.update(e_hpcg=e_hpcg, hpl_hpcg_ratio=e / e_hpcg)
        if r.cores >= 2:
            try:
                kw.update(alpha_hpcg=core.alpha_from_efficiency(e_hpcg, r.cores),
                          one_minus_alpha_hpcg=core.serial_from_efficiency(e_hpcg, r.cores))
            except core.ModelDomainError as exc:
                notes.append(f"hpcg: {exc}")
    return DerivedMetrics(e_hpl=e, one_minus_alpha_hpl=oma, alpha_hpl=alpha,
                          gain_hpl=e * r.cores, note="; ".join(notes), **kw)


@dataclass(frozen=True)
class ScatterRow:
    cores: int
    e_hpl: float
    e_hpcg: Optional[float]
    one_minus_alpha: Optional[float]


def scatter_data(records: Iterable[MachineRecord]) -> List[ScatterRow]:
    """One row per record, ascending in core count, for plotting on E(N, alpha)."""
    records = sorted(records, key=lambda r: (r.cores, r.rank))
    if not records:
        raise ValueError("records: must be non-empty")
    rows = []
    for r in records:
        d = derive(r)
        rows.append(ScatterRow(r.cores, d.e_hpl, d.e_hpcg, d.one_minus_alpha_hpl))
    return rows


def _cell(value) -> str:
    return "" if value is None else repr(value)


def format_scatter(rows: Iterable[ScatterRow]) -> str:
    names = [f.name for f in fields(ScatterRow)]
    lines = ["# " + "\t".join(names)]
    for row in rows:
        lines.append("\t".join(_cell(getattr(row, n)) for n in names))
    return "\n".join(lines) + "\n"
