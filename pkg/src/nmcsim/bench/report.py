"""Benchmark report schema, serialization, and golden-table comparison.

A report is a plain dict:

    {"schema_version": 1, "suite": ..., "preset": ..., "seed": ...,
     "entries": [{"id", "device", "kernel", "width", "shape", "metric",
                  "value", "unit", "cycles_total", "cycles_per_output",
                  "outputs", "host_cycles", "ok", "events"}, ...]}

Golden tables hold {"schema_version": 1, "values": [{"id", "value", "tol"}]}
and live in nmcsim/golden/; the NMCSIM_GOLDEN_DIR environment variable or an
explicit path overrides the packaged copies.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

SCHEMA_VERSION = 1

_CSV_FIELDS = ["id", "device", "kernel", "width", "shape", "metric", "value",
               "unit", "cycles_total", "cycles_per_output", "outputs",
               "host_cycles", "ok"]


def new_report(suite: str, preset: str, seed: int) -> dict:
    return {"schema_version": SCHEMA_VERSION, "suite": suite,
            "preset": preset, "seed": seed, "entries": []}


def entry(id: str, device: str, kernel: str, width: int, shape,
          metric: str, value: float, unit: str, *, cycles_total: int = 0,
          outputs: int = 0, host_cycles: int = 0, ok: bool = True,
          events: dict | None = None) -> dict:
    cpo = cycles_total / outputs if outputs else 0.0
    return {"id": id, "device": device, "kernel": kernel, "width": width,
            "shape": list(shape), "metric": metric, "value": value,
            "unit": unit, "cycles_total": cycles_total,
            "cycles_per_output": cpo, "outputs": outputs,
            "host_cycles": host_cycles, "ok": bool(ok),
            "events": events or {}}


def write_json(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=2) + "\n")


def load_report(path) -> dict:
    report = json.loads(Path(path).read_text())
    if report.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema in {path}")
    return report


def write_csv(report: dict, path) -> None:
    """Flat scalar fields only; nested event counters stay JSON-side."""
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=_CSV_FIELDS, extrasaction="ignore")
        w.writeheader()
        for e in report["entries"]:
            row = dict(e)
            row["shape"] = "x".join(str(d) for d in e["shape"])
            w.writerow(row)


def golden_dir() -> Path:
    env = os.environ.get("NMCSIM_GOLDEN_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent.parent / "golden"


def load_golden(name_or_path) -> dict:
    """Load a golden table by bare name (packaged) or explicit path."""
    p = Path(name_or_path)
    if not p.suffix:
        p = p.with_suffix(".json")
    if not p.is_absolute() and not p.exists():
        p = golden_dir() / p.name
    table = json.loads(p.read_text())
    if table.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported golden schema in {p}")
    return table


def compare(report: dict, golden: dict, default_tol: float | None = None) -> list[dict]:
    """Per-entry relative check: |measured - golden| / golden <= tol.

    Every golden id must appear in the report (a missing measurement is a
    failure); report entries without a golden value are ignored.
    """
    measured = {e["id"]: e for e in report["entries"]}
    rows = []
    for g in golden["values"]:
        tol = default_tol if default_tol is not None else g.get("tol", 0.0)
        e = measured.get(g["id"])
        if e is None:
            rows.append({"id": g["id"], "value": None, "golden": g["value"],
                         "tol": tol, "delta": None, "ok": False})
            continue
        want = g["value"]
        delta = (e["value"] - want) / want if want else e["value"] - want
        ok = abs(delta) <= tol and e.get("ok", True)
        rows.append({"id": g["id"], "value": e["value"], "golden": want,
                     "tol": tol, "delta": delta, "ok": ok})
    return rows
