"""Plot-ready tables: grid parsing and CSV/JSON emission with metadata."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError

META_KEYS = ("beta", "regime", "n", "tau", "sigma", "command", "seed", "version")


@dataclass(frozen=True)
class GridSpec:
    """Uniform axis MIN:MAX:STEPS (both ends included)."""

    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise UsageError(f"grid needs at least 2 steps, got {self.steps}")
        if not self.hi > self.lo:
            raise UsageError(f"grid max must exceed min, got {self.lo}:{self.hi}")

    @classmethod
    def parse(cls, text):
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must look like MIN:MAX:STEPS, got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise UsageError(f"cannot parse grid {text!r}: {exc}") from exc

    def points(self):
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass
class CurveRecord:
    meta: dict
    columns: list
    rows: list = field(default_factory=list)

    def __post_init__(self):
        missing = [k for k in META_KEYS if k not in self.meta]
        if missing:
            raise UsageError(f"metadata lacks keys {missing}")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise UsageError(f"row {row!r} does not match columns {self.columns}")

    def to_csv(self):
        buf = io.StringIO()
        for key in META_KEYS:
            buf.write(f"# {key}={self.meta[key]}\n")
        for key, value in self.meta.items():
            if key not in META_KEYS:
                buf.write(f"# {key}={value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self):
        rows = [[_json_value(v) for v in row] for row in self.rows]
        return json.dumps({"meta": self.meta, "columns": self.columns, "rows": rows}, indent=1)

    def dump(self, fmt="csv"):
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise UsageError(f"unknown format {fmt!r}")

    @classmethod
    def from_csv(cls, text):
        meta, body = {}, []
        for line in text.splitlines():
            if line.startswith("# ") and "=" in line and not body:
                key, value = line[2:].split("=", 1)
                meta[key] = value
            else:
                body.append(line)
        reader = csv.reader(body)
        columns = next(reader)
        rows = [[_parse(v) for v in row] for row in reader]
        return cls(meta, columns, rows)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(data["meta"], data["columns"], [list(r) for r in data["rows"]])


def _fmt(v):
    # repr of a float is the shortest string that round-trips
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _json_value(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _parse(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text
