"""Report records and their deterministic JSON / CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

REPORT_FORMAT = "spinberry-report/1"
CSV_COLUMNS = ("config_hash", "command", "name", "value", "route", "resolution", "tolerance", "verdict", "note")


@dataclass(frozen=True)
class ReportRecord:
    """One named scalar result with its provenance.

    ``verdict`` is ``"PASS"``, ``"FAIL"`` or ``""`` when no tolerance applies.
    """

    name: str
    value: float | int | str | bool | None
    route: str = ""
    resolution: str = ""
    tolerance: float | None = None
    verdict: str = ""
    note: str = ""


def verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def checked(name, value, tolerance, ok, route="", resolution="", note="") -> ReportRecord:
    return ReportRecord(name, _scalar(value), route, resolution, tolerance, verdict(bool(ok)), note)


def _scalar(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def vector_records(name, vec, route="", resolution="") -> list:
    return [ReportRecord(f"{name}.{c}", _scalar(float(x)), route, resolution) for c, x in zip("xyz", vec)]


@dataclass
class Report:
    command: str
    config_hash: str
    records: list
    summary: dict | None = None

    @property
    def failed(self) -> list:
        return [r.name for r in self.records if r.verdict == "FAIL"]

    def as_dict(self, extra: dict | None = None) -> dict:
        out = {
            "format": REPORT_FORMAT,
            "command": self.command,
            "config_hash": self.config_hash,
            "status": "FAIL" if self.failed else "PASS",
            "records": [dict(asdict(r), config_hash=self.config_hash) for r in self.records],
        }
        if self.summary is not None:
            out["summary"] = self.summary
        out.update(extra or {})
        return out

    def to_json(self, extra: dict | None = None) -> str:
        return json.dumps(self.as_dict(extra), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.records:
            value = "" if r.value is None else repr(r.value) if isinstance(r.value, float) else r.value
            tol = "" if r.tolerance is None else repr(r.tolerance)
            writer.writerow([self.config_hash, self.command, r.name, value, r.route, r.resolution, tol, r.verdict, r.note])
        return buf.getvalue()
