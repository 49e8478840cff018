#!/usr/bin/env python3
"""Regenerate the cycles/output golden table from the CPU baseline constants.

Each target is baseline_cpu_cycles_per_output / improvement_factor: if the
macro is N times faster end to end than a CPU that spends B cycles per
output, it must spend B/N itself. The result ships as
src/nmcsim/golden/cycles_per_output.json; run this after editing the
baseline file.
"""

import argparse
import json
from pathlib import Path

GOLDEN = Path(__file__).resolve().parent.parent / "src" / "nmcsim" / "golden"
TOL = 0.15


def derive(baseline: dict) -> dict:
    cpu = {b["id"]: b["value"] for b in baseline["baseline_cycles_per_output"]}
    values = []
    for imp in baseline["improvement"]:
        target = cpu[imp["baseline"]] / imp["value"]
        values.append({"id": imp["id"] + "-cpo",
                       "value": round(target, 6), "tol": TOL})
    return {
        "schema_version": baseline["schema_version"],
        "description": ("Derived cycles/output targets: CPU baseline "
                        "cycles/output divided by the published improvement "
                        "factor. Regenerated by tools/derive_targets.py."),
        "values": values,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--baseline", default=GOLDEN / "cpu_baseline.json")
    ap.add_argument("--out", default=GOLDEN / "cycles_per_output.json")
    args = ap.parse_args()
    table = derive(json.loads(Path(args.baseline).read_text()))
    Path(args.out).write_text(json.dumps(table, indent=2) + "\n")
    for v in table["values"]:
        print(f"{v['id']}: {v['value']} (tol {v['tol']})")


if __name__ == "__main__":
    main()
