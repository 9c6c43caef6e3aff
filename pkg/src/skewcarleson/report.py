"""Schema-versioned reports and their JSON/CSV serialisation."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0"
TOOL = "skewcarleson"


def sanitize(obj):
    """Convert numpy scalars/arrays and non-finite floats to plain JSON values.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``
    so that emitted reports stay strict JSON and parse back unchanged.
    """
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (complex, np.complexfloating)):
        return [sanitize(obj.real), sanitize(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(sanitize(list(values)))

    def to_dict(self) -> dict:
        return {"columns": list(self.columns), "rows": self.rows}


@dataclass
class Report:
    subcommand: str
    seed: int
    config: dict
    version: str
    results: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION
    tool: str = TOOL

    def table(self, name: str, columns) -> Table:
        t = Table(list(columns))
        self.tables[name] = t
        return t

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "schema_version": self.schema_version,
            "tool": self.tool,
            "version": self.version,
            "subcommand": self.subcommand,
            "seed": self.seed,
            "config": sanitize(self.config),
            "results": sanitize(self.results),
            "flags": sanitize(self.flags),
            "tables": {k: v.to_dict() for k, v in sorted(self.tables.items())},
        }
        if include_timing:
            out["timing"] = sanitize(self.timing)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema_version')!r}")
        return cls(
            subcommand=data["subcommand"],
            seed=data["seed"],
            config=data["config"],
            version=data["version"],
            results=data.get("results", {}),
            tables={k: Table(v["columns"], v["rows"]) for k, v in data.get("tables", {}).items()},
            flags=data.get("flags", {}),
            timing=data.get("timing", {}),
            schema_version=data["schema_version"],
            tool=data.get("tool", TOOL),
        )

    def normalized(self) -> "Report":
        """The report as it reads back from JSON."""
        return Report.from_dict(json.loads(to_json(self)))


def to_json(report: Report, include_timing: bool = True) -> str:
    return json.dumps(report.to_dict(include_timing), indent=2, sort_keys=True, allow_nan=False) + "\n"


def parse_json(text: str) -> Report:
    return Report.from_dict(json.loads(text))


def emit(report: Report, out, fmt: str = "json", include_timing: bool = True) -> list:
    """Write the report; returns the written paths.

    ``json`` writes one file at ``out``.  ``csv`` writes one file per table
    named ``<stem>_<table>.csv`` next to ``out``.
    """
    out = Path(out)
    if fmt not in ("json", "csv"):
        raise ValueError(f"format must be json or csv, got {fmt!r}")
    if fmt == "json":
        with out.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(to_json(report, include_timing))
        return [out]
    written = []
    for name, table in sorted(report.tables.items()):
        path = out.with_name(f"{out.stem}_{name}.csv")
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(table.columns)
            writer.writerows(table.rows)
        written.append(path)
    return written
