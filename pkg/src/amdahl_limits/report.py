"""Rendering of result tables as aligned text or tab-separated plot data."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.10g}"
    return str(v)


@dataclass
class Table:
    columns: Sequence[str]
    rows: List[Sequence] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(values)

    def to_text(self) -> str:
        cells = [[format_value(v) for v in row] for row in self.rows]
        widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(self.columns)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(self.columns, widths)).rstrip()]
        lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
        lines += self.notes
        return "\n".join(lines) + "\n"

    def to_plotdata(self) -> str:
        lines = ["# " + "\t".join(self.columns)]
        lines += ["\t".join(format_value(v) for v in row) for row in self.rows]
        lines += ["# " + note for note in self.notes]
        return "\n".join(lines) + "\n"

    def render(self, output: str) -> str:
        return self.to_plotdata() if output == "plotdata" else self.to_text()
