"""End-to-end checks of the nmcsim command-line interface."""

import json

import pytest

from nmcsim import cli
from nmcsim.caesar import asm as caesar_asm
from nmcsim.carus import asm as carus_asm

CAESAR_SRC = "csrw 8\nadd 0x800, 0x0, 0x1000\nmac 0x1, 0x1001\n"
XVNMC_SRC = ("    li x3, 64\n    vsetvl x5, x3, x9\n"
             "    vadd.vv v2, v1, v0\n    lui x1, 0x8\n    sw x0, 0(x1)\n")


def test_asm_caesar_writes_stream(tmp_path, capsys):
    src = tmp_path / "k.casm"
    src.write_text(CAESAR_SRC)
    out = tmp_path / "k.json"
    assert cli.main(["asm-caesar", str(src), "-o", str(out)]) == 0
    assert caesar_asm.load_stream(out) == caesar_asm.assemble(CAESAR_SRC)
    assert "3 commands" in capsys.readouterr().out


def test_asm_disasm_xvnmc_round_trip(tmp_path, capsys):
    src = tmp_path / "k.s"
    src.write_text(XVNMC_SRC)
    img = tmp_path / "k.bin"
    assert cli.main(["asm-xvnmc", str(src), "-o", str(img)]) == 0
    assert cli.main(["disasm-xvnmc", str(img)]) == 0
    text = capsys.readouterr().out.splitlines()[-5:]
    assert carus_asm.assemble("\n".join(text)) == carus_asm.load_image(img)


def test_run_reports_cycles_and_writes_json(tmp_path, capsys):
    out = tmp_path / "run.json"
    rc = cli.main(["run", "--device", "caesar", "--kernel", "add",
                   "--width", "8", "--shape", "64", "--json", str(out)])
    assert rc == 0
    line = capsys.readouterr().out
    assert "verify=pass" in line and "cycles=" in line
    report = json.loads(out.read_text())
    e = report["entries"][0]
    assert e["ok"] and e["outputs"] == 64 and e["device"] == "caesar"


def test_run_with_kernel_params(capsys):
    rc = cli.main(["run", "--device", "carus", "--kernel", "gemm",
                   "--shape", "2,3,4", "--alpha", "-2", "--beta", "3"])
    assert rc == 0 and "verify=pass" in capsys.readouterr().out


def test_bench_then_compare_round_trip(tmp_path, capsys):
    rc = cli.main(["bench", "--suite", "autoencoder", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "autoencoder.json").exists()
    assert (tmp_path / "autoencoder.csv").exists()
    golden = tmp_path / "golden.json"
    report = json.loads((tmp_path / "autoencoder.json").read_text())
    values = [{"id": e["id"], "value": e["value"], "tol": 0.0}
              for e in report["entries"]]
    golden.write_text(json.dumps({"schema_version": 1, "values": values}))
    capsys.readouterr()
    rc = cli.main(["compare", str(tmp_path / "autoencoder.json"),
                   "--golden", str(golden)])
    out = capsys.readouterr().out
    assert rc == 0 and out.count("pass") == len(values)


def test_compare_flags_out_of_band_values(tmp_path, capsys):
    report = {"schema_version": 1, "suite": "x", "preset": "table-v",
              "seed": 0, "entries": [
                  {"id": "a", "value": 2.0, "ok": True}]}
    (tmp_path / "r.json").write_text(json.dumps(report))
    golden = {"schema_version": 1,
              "values": [{"id": "a", "value": 1.0, "tol": 0.1},
                         {"id": "b", "value": 1.0, "tol": 0.1}]}
    (tmp_path / "g.json").write_text(json.dumps(golden))
    rc = cli.main(["compare", str(tmp_path / "r.json"),
                   "--golden", str(tmp_path / "g.json")])
    out = capsys.readouterr().out
    assert rc == 1
    assert "FAIL a" in out and "missing" in out
    # a generous override rescues the value mismatch but not the missing id
    assert cli.main(["compare", str(tmp_path / "r.json"),
                     "--golden", str(tmp_path / "g.json"), "--tol", "2"]) == 1


def test_run_exit_code_on_bad_usage():
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--device", "nope", "--kernel", "add", "--shape", "4"])
    assert exc.value.code == 2
