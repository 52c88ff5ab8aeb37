"""Reading and writing event files.

Univariate files hold one decimal time per line, optionally with ``#``
comment lines, or a CSV with a ``t`` column. Multivariate files are CSV with
columns ``t,component``. The horizon is not stored in the event file; it is
supplied explicitly or read from a JSON sidecar named ``<file>.json``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import List, Optional, TextIO

import numpy as np

from .exceptions import ValidationError
from .intensity import EventSequence


def format_float(x: float) -> str:
    return f"{x:.12g}"


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def _resolve_horizon(path, horizon):
    if horizon is not None:
        return float(horizon)
    side = sidecar_path(path)
    if side.exists():
        with open(side) as fh:
            meta = json.load(fh)
        if "horizon" not in meta:
            raise ValidationError(f"{side} has no 'horizon' entry")
        return float(meta["horizon"])
    raise ValidationError(f"no horizon given and no sidecar {side} found")


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def _parse_time(token, lineno):
    try:
        value = float(token)
    except ValueError:
        raise ValidationError(f"cannot parse time {token!r}", line=lineno) from None
    if not math.isfinite(value):
        raise ValidationError(f"time {token!r} is not finite", line=lineno)
    return value


def _check_order(values, linenos, horizon):
    for idx, (value, lineno) in enumerate(zip(values, linenos)):
        if value < 0:
            raise ValidationError(f"time {value} is negative", line=lineno)
        if idx and value <= values[idx - 1]:
            raise ValidationError(
                f"times must be strictly increasing ({value} after {values[idx - 1]})", line=lineno
            )
        if horizon is not None and value > horizon:
            raise ValidationError(f"time {value} exceeds horizon {horizon}", line=lineno)


def parse_events(text: str, horizon: float) -> EventSequence:
    """Parse newline-delimited or single-column CSV (``t`` header) times."""
    lines = list(_data_lines(text))
    if lines and lines[0][1].lower().split(",")[0].strip() == "t":
        header = [h.strip().lower() for h in lines[0][1].split(",")]
        col = header.index("t")
        rows = [(n, line.split(",")[col].strip()) for n, line in lines[1:]]
    else:
        rows = lines
    values = [_parse_time(tok, n) for n, tok in rows]
    _check_order(values, [n for n, _ in rows], horizon)
    return EventSequence(np.array(values), horizon)


def read_events(path, horizon: Optional[float] = None) -> EventSequence:
    horizon = _resolve_horizon(path, horizon)
    with open(path) as fh:
        return parse_events(fh.read(), horizon)


def read_multivariate_events(path, horizon: Optional[float] = None, dim: Optional[int] = None):
    """Read a ``t,component`` CSV into one :class:`EventSequence` per component.

    Components are zero-based integers; streams are checked individually.
    """
    horizon = _resolve_horizon(path, horizon)
    with open(path) as fh:
        lines = list(_data_lines(fh.read()))
    if not lines or [h.strip().lower() for h in lines[0][1].split(",")][:2] != ["t", "component"]:
        raise ValidationError("multivariate event file needs a 't,component' header", line=1)
    per: dict = {}
    for lineno, line in lines[1:]:
        parts = line.split(",")
        if len(parts) < 2:
            raise ValidationError("expected 't,component'", line=lineno)
        t = _parse_time(parts[0].strip(), lineno)
        try:
            comp = int(parts[1])
        except ValueError:
            raise ValidationError(f"bad component {parts[1]!r}", line=lineno) from None
        if comp < 0 or (dim is not None and comp >= dim):
            raise ValidationError(f"component {comp} out of range", line=lineno)
        per.setdefault(comp, []).append((t, lineno))
    m = dim if dim is not None else (max(per) + 1 if per else 0)
    streams = []
    for c in range(m):
        entries = per.get(c, [])
        values = [t for t, _ in entries]
        _check_order(values, [n for _, n in entries], horizon)
        streams.append(EventSequence(np.array(values), horizon))
    return streams


def write_events(times, out: TextIO) -> None:
    for t in times:
        out.write(format_float(float(t)) + "\n")


def write_multivariate_events(streams: List[EventSequence], out: TextIO) -> None:
    rows = sorted((float(t), c) for c, s in enumerate(streams) for t in s.times)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t", "component"])
    for t, c in rows:
        writer.writerow([format_float(t), c])


def write_table(columns: dict, out: TextIO) -> None:
    """CSV with one column per key; floats use 12 significant digits."""
    writer = csv.writer(out, lineterminator="\n")
    names = list(columns)
    writer.writerow(names)
    for row in zip(*(columns[n] for n in names)):
        writer.writerow([_cell(v) for v in row])


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    return v


def events_to_json(events: EventSequence) -> str:
    return json.dumps({"horizon": events.horizon, "times": events.times.tolist()})


def table_to_string(columns: dict) -> str:
    buf = io.StringIO()
    write_table(columns, buf)
    return buf.getvalue()
