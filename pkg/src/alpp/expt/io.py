"""Versioned CSV tables and JSON summaries."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

CSV_VERSION = "v1"


def csv_text(command: str, columns, rows) -> str:
    """CSV with the header comment ``# alpp-csv v1 <command>``; floats use ``repr`` so
    values round-trip exactly."""
    buf = io.StringIO()
    buf.write(f"# alpp-csv {CSV_VERSION} {command}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def read_csv(path) -> tuple[str, list[str], list[dict]]:
    """Returns ``(command, columns, rows)``; values stay strings."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# alpp-csv "):
        raise ValueError(f"{path} is not an alpp CSV")
    _, _, version, command = lines[0].split(" ", 3)
    if version != CSV_VERSION:
        raise ValueError(f"unsupported CSV version {version}")
    rd = csv.DictReader(lines[1:])
    return command, rd.fieldnames, list(rd)


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, (np.bool_, bool)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, (float, np.floating)):
        f = float(o)
        return f if math.isfinite(f) else None
    return o


def write_result(result, out_dir) -> list[Path]:
    """Write ``<command>.csv`` (+ extra tables) and ``<command>.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cmd = result.config["command"]
    paths = []
    p = out / f"{cmd}.csv"
    p.write_text(csv_text(cmd, result.columns, result.records))
    paths.append(p)
    for name, (cols, rows) in result.tables.items():
        q = out / f"{cmd}_{name}.csv"
        q.write_text(csv_text(f"{cmd}_{name}", cols, rows))
        paths.append(q)
    j = out / f"{cmd}.json"
    j.write_text(json.dumps(_jsonable({"config": result.config, "summary": result.summary,
                                       "provenance": result.provenance}), indent=2, sort_keys=True) + "\n")
    paths.append(j)
    return paths
