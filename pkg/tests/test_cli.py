import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from degmaps.catalog import CATALOG_ENV, default_catalog_path
from degmaps.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, run_verify
from degmaps.obstruction import PAIRS

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("UPDATE_GOLDEN") == "1"  # UPDATE_GOLDEN=1 pytest tests/test_cli.py


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def golden(name, text):
    path = GOLDEN / name
    if UPDATE:
        path.write_text(text, encoding="utf-8")
    assert text == path.read_text(encoding="utf-8")


@pytest.fixture
def mutated(tmp_path):
    raw = json.loads(default_catalog_path().read_text(encoding="utf-8"))
    for w in raw["whitehead_values"]:
        if w["a"] == "iota_3@M01":
            w["value"] = {}
    p = tmp_path / "mut.json"
    p.write_text(json.dumps(raw), encoding="utf-8")
    return p


@pytest.mark.parametrize("fmt,ext", [("text", "txt"), ("md", "md")])
def test_table_golden(capsys, fmt, ext):
    code, out, _ = run(capsys, "table", "--format", fmt)
    assert code == EXIT_OK
    golden(f"table.{ext}", out)


def test_table_json(capsys):
    code, out, _ = run(capsys, "table", "--format", "json")
    rows = json.loads(out)
    assert code == EXIT_OK and len(rows) == 9
    assert rows[-1]["degree_set"] == {"lcm": 4, "residues": [0, 1, 3]}


@pytest.mark.parametrize("pair", PAIRS, ids=lambda p: f"{p[0]}-{p[1]}")
def test_trace_golden(capsys, pair):
    code, out, _ = run(capsys, "trace", pair[0].lower(), pair[1].lower())
    assert code == EXIT_OK
    golden(f"trace_{pair[0]}_{pair[1]}.txt", out)


def test_compute_text(capsys):
    code, out, _ = run(capsys, "compute", "s3xs5", "m01")
    assert code == EXIT_OK
    assert "condition: k*l ≡ 0 (mod 2)" in out
    assert out.rstrip().endswith("D = 2Z")


def test_compute_json(capsys):
    code, out, _ = run(capsys, "compute", "SU3", "S3xS5", "--format", "json")
    rec = json.loads(out)
    assert rec["degree_set"] == {"lcm": 4, "residues": [0]}
    assert rec["condition"] == "k ≡ 0 (mod 2)"


def test_compute_sign(capsys):
    _, a, _ = run(capsys, "compute", "m01", "m01", "--sign", "-1")
    _, b, _ = run(capsys, "compute", "m01", "m01")
    assert a == b


def test_trace_json(capsys):
    code, out, _ = run(capsys, "trace", "su3", "su3", "--format", "json")
    data = json.loads(out)
    assert data["pair"] == ["SU3", "SU3"] and data["traces"]


def test_trace_replay(capsys):
    code, out, _ = run(capsys, "trace", "su3", "m01", "--replay")
    assert code == EXIT_OK
    assert "traces reproduced" in out


def test_unknown_manifold(capsys):
    with pytest.raises(SystemExit) as err:
        main(["compute", "cp4", "su3"])
    assert err.value.code == EXIT_USAGE


def test_bad_sign(capsys):
    with pytest.raises(SystemExit) as err:
        main(["table", "--sign", "2"])
    assert err.value.code == EXIT_USAGE


def test_bad_catalog(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{", encoding="utf-8")
    code, _, err = run(capsys, "table", "--catalog", str(p))
    assert code == EXIT_USAGE and "catalog error" in err


def test_strict_load_rejects_mutation(capsys, mutated):
    code, _, err = run(capsys, "table", "--catalog", str(mutated))
    assert code == EXIT_USAGE and "attaching-maps" in err


def test_env_catalog(capsys, mutated, monkeypatch):
    monkeypatch.setenv(CATALOG_ENV, str(mutated))
    code, _, _ = run(capsys, "compute", "m01", "m01")
    assert code == EXIT_USAGE


def test_verify_ok(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == EXIT_OK
    assert out.rstrip().endswith("9/9 pairs verified")


def test_verify_mutation(capsys, mutated):
    code, out, _ = run(capsys, "verify", "--catalog", str(mutated))
    assert code == EXIT_FAIL
    assert "attaching-maps" in out
    assert "S3xS5->M01" in out and "M01->M01" in out
    assert not out.rstrip().endswith("9/9 pairs verified")


def test_verify_zero_window(capsys):
    code, out, _ = run(capsys, "verify", "--oracle-d", "0")
    assert code == EXIT_OK
    assert "warning" in out and "vacuous" in out


def test_verify_small_box_reports_hint():
    rep = run_verify(None, 50, 100)
    assert not rep.ok
    assert all("box smaller than window" in f for f in rep.failures)


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "degmaps", "compute", "su3", "su3"],
        capture_output=True, text=True, check=True,
    ).stdout
    assert "D = 4Z ∪ (1+2Z)" in out
