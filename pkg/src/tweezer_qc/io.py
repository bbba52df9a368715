"""Plain-text artifacts: CSV with provenance headers and ``key = value`` blocks."""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path

import numpy as np

from . import __version__

TOOL = "tweezer_qc"


def format_value(v):
    """Shortest text that round-trips floats exactly; sequences are comma-joined."""
    if isinstance(v, np.ndarray):
        v = v.ravel().tolist()
    if isinstance(v, (list, tuple)):
        return ",".join(format_value(x) for x in v)
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def parameter_hash(params: dict) -> str:
    text = "\n".join(f"{k}={format_value(params[k])}" for k in sorted(params))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def header_lines(params: dict, comment=""):
    lines = [f"# tool = {TOOL} {__version__}", f"# params_hash = {parameter_hash(params)}"]
    if comment:
        lines.append(f"# {comment}")
    return lines


def write_csv(path, columns, rows, params=None, comment=""):
    """Write ``rows`` under ``#``-prefixed provenance lines and a column header."""
    params = params or {}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        for line in header_lines(params, comment):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def read_csv(path):
    """Return ``(header dict, column names, float array)``."""
    meta, body = {}, []
    with Path(path).open() as fh:
        for line in fh:
            if line.startswith("#"):
                key, sep, value = line[1:].partition("=")
                if sep:
                    meta[key.strip()] = value.strip()
            elif line.strip():
                body.append(line)
    rows = list(csv.reader(body))
    columns, data = rows[0], rows[1:]
    return meta, columns, np.array([[float(x) for x in r] for r in data]).reshape(-1, len(columns))


def write_keyvalue(path, mapping: dict, params=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = header_lines(params or mapping)
    lines += [f"{k} = {format_value(v)}" for k, v in mapping.items()]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_keyvalue(path) -> dict:
    """Parse ``key = value`` lines; numbers and comma lists become floats/arrays."""
    out = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = _parse(value.strip())
    return out


def _parse(text):
    if text in ("true", "false"):
        return text == "true"
    try:
        if "," in text:
            return np.array([float(x) for x in text.split(",")])
        return int(text) if text.lstrip("-").isdigit() else float(text)
    except ValueError:
        return text
