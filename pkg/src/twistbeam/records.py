"""Tabular output records: CSV and JSON writers/readers with a versioned header.

CSV layout::

    # twistbeam v<version> <ISO date> <config hash>
    col1,col2,...
    ...

Floats are written with 12 significant digits; non-finite values as ``inf``,
``-inf`` or ``nan``; missing cells as empty strings.
"""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__

SCHEMA_VERSION = 1
_HEADER_RE = re.compile(r"^# twistbeam v(\S+) (\d{4}-\d{2}-\d{2}) ([0-9a-f]+)$")


@dataclass
class Table:
    columns: list[str]
    rows: list[dict]
    meta: dict = field(default_factory=dict)


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def run_date() -> str:
    """UTC date of the run; ``SOURCE_DATE_EPOCH`` pins it for reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc).date().isoformat()
    return _dt.datetime.now(_dt.timezone.utc).date().isoformat()


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    if hasattr(v, "item"):  # numpy scalar
        return format_value(v.item())
    return str(v)


def parse_value(s: str):
    if s == "":
        return None
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def _json_value(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float):
        if not math.isfinite(v):
            return format_value(v)
        return float(format_value(v))
    return v


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    meta = table.meta
    buf.write(f"# twistbeam v{meta['version']} {meta['date']} {meta['config_hash']}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(row.get(c)) for c in table.columns])
    return buf.getvalue()


def render_json(table: Table) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        **table.meta,
        "columns": table.columns,
        "rows": [{c: _json_value(row.get(c)) for c in table.columns} for row in table.rows],
    }
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def make_table(columns, rows, config: dict, extra_meta: dict | None = None) -> Table:
    meta = {
        "version": __version__,
        "date": run_date(),
        "config_hash": config_hash(config),
        "config": config,
    }
    if extra_meta:
        meta.update(extra_meta)
    return Table(list(columns), list(rows), meta)


def write_table(table: Table, path: str | os.PathLike | None, fmt: str = "csv", stream=None) -> str:
    """Render and write atomically; with no ``path`` the text goes to ``stream``."""
    text = render_csv(table) if fmt == "csv" else render_json(table)
    if path is None:
        if stream is not None:
            stream.write(text)
        return text
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=".twistbeam-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return text


def read_table(path: str | os.PathLike) -> Table:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        cols = doc.pop("columns")
        rows = [
            {c: (parse_value(v) if isinstance(v, str) and v in ("inf", "-inf", "nan") else v)
             for c, v in r.items()}
            for r in doc.pop("rows")
        ]
        return Table(cols, rows, doc)
    lines = text.splitlines()
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ValueError("missing twistbeam header line")
    reader = csv.reader(lines[1:])
    cols = next(reader)
    rows = [{c: parse_value(v) for c, v in zip(cols, vals)} for vals in reader]
    return Table(cols, rows, {"version": m.group(1), "date": m.group(2), "config_hash": m.group(3)})
