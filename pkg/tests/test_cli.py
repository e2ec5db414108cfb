import json
import subprocess
import sys

import pytest

from majoranahv.cli import main


def run(*args):
    return subprocess.run(
        [sys.executable, "-m", "majoranahv.cli", *args], capture_output=True, text=True
    )


def test_run_builtin(capsys):
    assert main(["run", "fusion-cross-pair", "--engine", "hv1", "--exact"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["arithmetic"] == "exact-dyadic"
    assert len(doc["entries"]) == 4


def test_run_quantum_discriminator(capsys):
    assert main(["run", "interference-6box", "--engine", "quantum"]) == 0
    doc = json.loads(capsys.readouterr().out)
    rows = {tuple(r["trace"]): r["p_float"] for r in doc["entries"]}
    assert ("even", "odd") not in rows


def test_run_sampled_is_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["run", "interference-6box", "--engine", "hv2", "--shots", "1000", "--seed", "7", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_run_file_and_errors(tmp_path):
    good = tmp_path / "good.scn"
    good.write_text("boxes 4\ninit (1,2)=even (3,4)=even\nmeasure 2 3\n")
    assert main(["run", str(good), "--engine", "stab"]) == 0
    bad = tmp_path / "bad.scn"
    bad.write_text("boxes 4\ninit (1,2)=even\n")
    assert main(["run", str(bad)]) == 2
    assert main(["run", "no-such-thing"]) == 2
    assert main(["run", "cnot"]) == 2
    assert main(["run", "fusion-same-pair", "--shots", "0"]) == 2


def test_run_guard_exit(monkeypatch):
    import majoranahv.evaluate as ev

    monkeypatch.setattr(ev, "MAX_LEAVES", 2)
    assert main(["run", "fusion-cross-pair", "--engine", "hv1"]) == 3


def test_compare_exit_codes(capsys):
    assert main(["compare", "successive-braiding-n2", "--engines", "quantum,hv2"]) == 0
    capsys.readouterr()
    assert main(["compare", "hv1-braid-failure", "--engines", "quantum,hv1"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["tv_matrix"][0][1] == 1.0
    assert main(["compare", "fusion-same-pair", "--engines", "quantum,hv1,hv2,stab"]) == 0
    assert main(["compare", "fusion-same-pair", "--engines", "quantum"]) == 2


def test_compare_writes_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["compare", "interference-6box", "--engines", "quantum,hv2", "--out", str(out)]) == 1
    doc = json.loads(out.read_text())
    assert doc["verdicts"] == {"quantum-hv2": "mismatch"}
    assert "mismatch" in capsys.readouterr().out


def test_hierarchy(tmp_path, capsys):
    out = tmp_path / "h.json"
    assert main(["hierarchy", "--out", str(out)]) == 0
    table = capsys.readouterr().out
    assert "| hv1 | ✓ | ✗ | ✗ |" in table
    assert "| hv2 | ✓ | ✓ | ✗ |" in table
    assert json.loads(out.read_text())["matches_expected"] is True


@pytest.mark.parametrize("oracle", ["stab", "quantum"])
def test_calibrate(oracle, capsys):
    assert main(["calibrate", "--oracle", oracle]) == 0
    assert "ccw front = rightward" in capsys.readouterr().out


def test_calibrate_bad_oracle():
    assert run("calibrate", "--oracle", "hv1").returncode == 2


def test_byte_identical_json():
    a = run("compare", "joint-zz-entangle", "--engines", "quantum,stab")
    b = run("compare", "joint-zz-entangle", "--engines", "quantum,stab")
    assert a.returncode == 0 and a.stdout == b.stdout
