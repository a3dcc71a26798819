"""Row serialization: CSV and JSON Lines, byte-stable for a given row list."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from typing import Iterable

import numpy as np

from .sweep import SweepRow

DIAGNOSTICS = ("unitarity_defect", "contraction_excess", "cond", "rank_M", "rank_tau", "flags")


def fmt_float(x: float) -> str:
    """Shortest repr that round-trips (at most 17 significant digits)."""
    return repr(float(x))


def _ordered(rows: list[SweepRow]):
    return sorted(rows, key=lambda r: r.lam)


def _columns(rows: list[SweepRow]) -> list[tuple[str, str | None, int | None, int | None]]:
    """Union of output columns: kinds in first-seen order, entries block-row-col."""
    kinds: dict[str, set | None] = {}
    for r in rows:
        for kind, val in r.outputs.items():
            if isinstance(val, dict):
                cells = kinds.setdefault(kind, set())
                for block, m in val.items():
                    cells.update((block, i, j) for i in range(m.shape[0]) for j in range(m.shape[1]))
            else:
                kinds.setdefault(kind, None)
    cols = []
    for kind, cells in kinds.items():
        if cells is None:
            cols.append((kind, None, None, None))
        else:
            cols.extend((kind, b, i, j) for b, i, j in sorted(cells))
    return cols


def header(rows: list[SweepRow]) -> list[str]:
    out = ["lambda"]
    for kind, block, i, j in _columns(rows):
        if block is None:
            out.append(kind)
        else:
            out += [f"{kind}.{block}.{i}.{j}.re", f"{kind}.{block}.{i}.{j}.im"]
    return out + list(DIAGNOSTICS)


def _int_or_empty(v: int | None) -> str:
    return "" if v is None else str(v)


def _csv_lines(rows: list[SweepRow]) -> Iterable[list[str]]:
    cols = _columns(rows)
    for r in rows:
        line = [fmt_float(r.lam)]
        for kind, block, i, j in cols:
            val = r.outputs.get(kind)
            if block is None:
                line.append("" if val is None else fmt_float(val))
                continue
            m = val.get(block) if isinstance(val, dict) else None
            if m is None or i >= m.shape[0] or j >= m.shape[1]:
                line += ["", ""]
            else:
                z = complex(m[i, j])
                line += [fmt_float(z.real), fmt_float(z.imag)]
        line += [fmt_float(r.unitarity_defect), fmt_float(r.contraction_excess), fmt_float(r.cond),
                 _int_or_empty(r.rank_M), _int_or_empty(r.rank_tau), ";".join(r.flags)]
        yield line


def _json_value(x: float):
    return x if math.isfinite(x) else repr(x)


def row_to_dict(r: SweepRow) -> dict:
    outs = {}
    for kind, val in r.outputs.items():
        if isinstance(val, dict):
            outs[kind] = {b: {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}
                          for b, m in val.items() if m.size}
        else:
            outs[kind] = _json_value(val)
    return {
        "lambda": r.lam, "outputs": outs,
        "unitarity_defect": _json_value(r.unitarity_defect),
        "contraction_excess": _json_value(r.contraction_excess),
        "cond": _json_value(r.cond), "rank_M": r.rank_M, "rank_tau": r.rank_tau,
        "flags": list(r.flags),
    }


def render(rows: list[SweepRow], format: str = "csv") -> str:
    rows = _ordered(rows)
    if format == "jsonl":
        return "".join(json.dumps(row_to_dict(r), separators=(",", ":")) + "\n" for r in rows)
    if format != "csv":
        raise ValueError(f"unknown format {format!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header(rows))
    w.writerows(_csv_lines(rows))
    return buf.getvalue()


def emit(rows: list[SweepRow], format: str = "csv", path: str | None = None) -> None:
    """Write rows to ``path`` (stdout when ``None``). ``OSError`` propagates."""
    text = render(rows, format)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def read_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))
