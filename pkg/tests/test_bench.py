"""Report serialization, golden comparison, and the canned suites."""

import csv
import importlib.util
import json
from pathlib import Path

import pytest

from nmcsim.bench import report as rep
from nmcsim.bench import suite
from nmcsim.kernels import KERNELS, output_count

WIDTHS = (8, 16, 32)


def _sample_report():
    r = rep.new_report("unit", "table-v", 7)
    r["entries"].append(rep.entry(
        "dev-add-w8-cpo", "dev", "add", 8, (64,), "cycles_per_output",
        0.5, "cycles/output", cycles_total=32, outputs=64, host_cycles=70,
        events={"sram_reads": [1, 2]}))
    r["entries"].append(rep.entry(
        "dev-mul-w8-cpo", "dev", "mul", 8, (4, 4), "cycles_per_output",
        2.0, "cycles/output", cycles_total=32, outputs=16, ok=False))
    return r


def test_json_roundtrip(tmp_path):
    r = _sample_report()
    p = tmp_path / "r.json"
    rep.write_json(r, p)
    assert rep.load_report(p) == r


def test_load_report_rejects_other_schemas(tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"schema_version": 99, "entries": []}))
    with pytest.raises(ValueError):
        rep.load_report(p)


def test_csv_is_flat(tmp_path):
    p = tmp_path / "r.csv"
    rep.write_csv(_sample_report(), p)
    rows = list(csv.DictReader(p.open()))
    assert [r["id"] for r in rows] == ["dev-add-w8-cpo", "dev-mul-w8-cpo"]
    assert rows[0]["shape"] == "64" and rows[1]["shape"] == "4x4"
    assert rows[0]["cycles_per_output"] == "0.5"
    assert "events" not in rows[0]


def test_entry_derives_cycles_per_output():
    e = rep.entry("x", "d", "k", 8, (1,), "m", 1.0, "u",
                  cycles_total=30, outputs=12)
    assert e["cycles_per_output"] == 2.5
    assert rep.entry("x", "d", "k", 8, (1,), "m", 1.0, "u")["cycles_per_output"] == 0.0


def test_compare_semantics():
    report = _sample_report()
    golden = {"schema_version": 1, "values": [
        {"id": "dev-add-w8-cpo", "value": 0.52, "tol": 0.05},
        {"id": "dev-mul-w8-cpo", "value": 2.0, "tol": 0.10},
        {"id": "dev-missing", "value": 1.0, "tol": 0.50},
    ]}
    rows = {r["id"]: r for r in rep.compare(report, golden)}
    assert rows["dev-add-w8-cpo"]["ok"]          # within 5%
    assert not rows["dev-mul-w8-cpo"]["ok"]      # exact match but entry ok=False
    assert not rows["dev-missing"]["ok"] and rows["dev-missing"]["value"] is None
    # a global tolerance override replaces the per-value ones
    tight = {r["id"]: r for r in rep.compare(report, golden, default_tol=0.01)}
    assert not tight["dev-add-w8-cpo"]["ok"]


def test_compare_zero_golden_uses_absolute_delta():
    report = rep.new_report("unit", "table-v", 0)
    report["entries"].append(rep.entry("z", "d", "k", 8, (1,), "m", 0.0, "u"))
    rows = rep.compare(report, {"schema_version": 1,
                                "values": [{"id": "z", "value": 0.0, "tol": 0.0}]})
    assert rows[0]["ok"]


def test_load_golden_by_name_and_path(tmp_path, monkeypatch):
    monkeypatch.delenv("NMCSIM_GOLDEN_DIR", raising=False)
    packaged = rep.load_golden("peak_gops")
    assert {v["id"] for v in packaged["values"]} == {
        "caesar-peak-macs-w8", "caesar-peak-gops-w8",
        "carus-peak-macs-w8", "carus-peak-gops-w8"}
    by_path = rep.load_golden(rep.golden_dir() / "peak_gops.json")
    assert by_path == packaged
    # environment override redirects bare names
    alt = {"schema_version": 1, "values": [{"id": "q", "value": 1.0, "tol": 0}]}
    (tmp_path / "peak_gops.json").write_text(json.dumps(alt))
    monkeypatch.setenv("NMCSIM_GOLDEN_DIR", str(tmp_path))
    assert rep.load_golden("peak_gops") == alt


def test_load_golden_rejects_other_schemas(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"schema_version": 2, "values": []}))
    with pytest.raises(ValueError):
        rep.load_golden(p)


def test_shipped_golden_tables_parse():
    for name in ("matmul_cycles", "peak_gops", "cycles_per_output"):
        table = rep.load_golden(name)
        for v in table["values"]:
            assert v["value"] > 0 and 0 <= v["tol"] < 1


def test_standard_specs_are_valid():
    for device in ("caesar", "carus"):
        for kernel in KERNELS:
            for width in WIDTHS:
                spec = suite.standard_spec(device, kernel, width)
                assert spec.name == kernel and spec.width == width
                assert output_count(spec) > 0


def test_autoencoder_suite_is_deterministic():
    a = suite.run_suite("autoencoder", seed=3)
    b = suite.run_suite("autoencoder", seed=3)
    assert a == b
    assert {e["id"] for e in a["entries"]} == {
        "caesar-autoencoder-w8-" + "x".join(map(str, suite.AE_DIMS)),
        "carus-autoencoder-w8-" + "x".join(map(str, suite.AE_DIMS))}
    assert all(e["ok"] and e["cycles_total"] > 0 for e in a["entries"])


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        suite.run_suite("nope")


def _load_derive():
    path = Path(__file__).resolve().parent.parent / "tools" / "derive_targets.py"
    mod_spec = importlib.util.spec_from_file_location("derive_targets", path)
    mod = importlib.util.module_from_spec(mod_spec)
    mod_spec.loader.exec_module(mod)
    return mod


def test_shipped_targets_match_baseline_division():
    dt = _load_derive()
    baseline = json.loads((rep.golden_dir() / "cpu_baseline.json").read_text())
    derived = dt.derive(baseline)
    shipped = rep.load_golden("cycles_per_output")
    assert derived["values"] == shipped["values"]
    by_id = {v["id"]: v["value"] for v in derived["values"]}
    assert by_id["caesar-matmul-w8-cpo"] == pytest.approx(112.0 / 28.0)
    assert by_id["carus-relu-w8-cpo"] == pytest.approx(13.0 / 99.6, rel=1e-5)
