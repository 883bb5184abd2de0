"""CSV ingestion and the JSON results document."""
import csv
import datetime
import hashlib
import json
import math
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ICTAError

SCHEMA_NAME = "icta-results"
SCHEMA_VERSION = "1.0"


class ParseError(ICTAError, ValueError):
    """Malformed input file."""


def read_columns(path, required, optional=()):
    """Read named float columns from a headed CSV file.

    Lines starting with ``#`` and blank lines are skipped. Returns a dict of
    1-D arrays keyed by column name (optional columns only when present).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror or exc})") from exc
    rows = [(n, line) for n, line in enumerate(text.splitlines(), start=1)
            if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise ParseError(f"{path}: no header row")
    header_line, header = rows[0]
    names = [h.strip() for h in next(csv.reader([header]))]
    for col in required:
        if col not in names:
            raise ParseError(f"{path}:{header_line}: missing column {col!r} (found {names})")
    wanted = list(required) + [c for c in optional if c in names]
    index = {c: names.index(c) for c in wanted}
    out = {c: [] for c in wanted}
    for n, line in rows[1:]:
        fields = next(csv.reader([line]))
        if len(fields) != len(names):
            raise ParseError(f"{path}:{n}: expected {len(names)} fields, got {len(fields)}")
        for c, i in index.items():
            try:
                out[c].append(float(fields[i]))
            except ValueError:
                raise ParseError(f"{path}:{n}: column {c!r}: cannot parse {fields[i].strip()!r} as a number") from None
    return {c: np.array(v) for c, v in out.items()}


def write_columns(path, columns, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in zip(*(data[c] for c in columns)):
            w.writerow(["" if v is None else repr(float(v)) if isinstance(v, (float, np.floating)) else v
                        for v in row])


def file_digest(path):
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _clean(value):
    """Convert numpy scalars/arrays to JSON-ready Python objects, NaN to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def table(columns, units=None, **data):
    """Column-oriented table; every column listed in ``columns`` must be in ``data``."""
    missing = [c for c in columns if c not in data]
    if missing:
        raise KeyError(f"table is missing columns {missing}")
    out = {"columns": list(columns), "data": {c: data[c] for c in columns}}
    if units:
        out["units"] = dict(units)
    return out


def results_document(command, config, tables, scalars=None, inputs=(), timestamp=None):
    from . import __version__

    if timestamp is None:
        timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    doc = {
        "schema": SCHEMA_NAME,
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "tables": tables,
        "scalars": scalars or {},
        "provenance": {
            "timestamp": timestamp,
            "tool_version": __version__,
            "input_digests": {str(p): file_digest(p) for p in inputs},
        },
    }
    doc = _clean(doc)
    validate_document(doc)
    return doc


def load_schema():
    return json.loads(resources.files("icta").joinpath("results_schema.json").read_text(encoding="utf-8"))


def validate_document(doc):
    """Raise ``jsonschema.ValidationError`` if ``doc`` does not match the schema."""
    jsonschema.validate(doc, load_schema())


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_document(doc, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc), encoding="utf-8")


def read_document(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: cannot read results document ({exc})") from exc
    validate_document(doc)
    return doc


def write_tables(doc, directory):
    """One CSV per table of ``doc``; 2-D columns are skipped."""
    directory = Path(directory)
    written = []
    for name, tab in doc["tables"].items():
        cols = [c for c in tab["columns"] if not any(isinstance(v, list) for v in tab["data"][c])]
        if not cols:
            continue
        path = directory / f"{doc['command']}_{name}.csv"
        write_columns(path, cols, tab["data"])
        written.append(path)
    return written
