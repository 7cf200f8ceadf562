import json
import subprocess
import sys

import numpy as np
import pytest

from defquad.cli import FIGURES, build_parser, render_csv, run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_brackets_csv(capsys):
    code, out, _ = call(capsys, "brackets", "--kind", "mathq", "--q", "0.9", "--n", "5", "--format", "csv")
    assert code == 0
    lines = [l for l in out.split("\n") if l and not l.startswith("#")]
    assert lines[0] == "n,bracket"
    assert len(lines) == 7
    assert lines[3] == "2,1.81"


def test_domain_error_exit_two(capsys):
    code, out, err = call(capsys, "density", "--kind", "mathq", "--q", "1.2")
    assert code == 2 and out == ""
    assert "0<q<1" in err and err.count("\n") == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["density", "--kind", "nope"],
        ["density", "--points", "1"],
        ["density", "--x-min", "2", "--x-max", "1"],
        ["density", "--eta", "-1"],
        ["density", "--levels", "3"],
        ["brackets", "--kind", "pq", "--p", "2", "--q", "0.5"],
        ["verify", "--q", "0.5"],
        [],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    assert call(capsys, *argv)[0] == 2


def test_help_exits_zero_and_lists_defaults(capsys):
    for sub in ("brackets", "polys", "density", "wavefunction", "verify", "figure"):
        code, out, _ = call(capsys, sub, "--help")
        assert code == 0
        assert "(default:" in out


def test_every_option_shows_a_default():
    parser = build_parser()
    subparsers = next(a for a in parser._actions if a.choices and isinstance(a.choices, dict)).choices
    for name, sub in subparsers.items():
        for action in sub._actions:
            if action.option_strings and action.dest != "help":
                assert action.help, (name, action.dest)


def test_verify_algebra_pq(capsys):
    code, out, _ = call(capsys, "verify", "--suite", "algebra", "--kind", "pq", "--p", "1.5", "--q", "0.5")
    assert code == 0
    report = json.loads(out)
    assert report["passed"]
    assert report["max_values"]["q_commutator_residual"] <= 1e-12
    assert report["max_values"]["xp_commutator_residual"] <= 1e-12


def test_verify_reports_failure_with_exit_one(capsys):
    code, out, err = call(capsys, "verify", "--suite", "polynomials", "--kind", "mathq", "--q", "0.999")
    report = json.loads(out)
    hermite = next(c for c in report["checks"] if c["name"] == "hermite_limit")
    assert code == (0 if hermite["passed"] else 1)
    if code:
        assert "hermite_limit" in err


def test_density_json_metadata(capsys):
    code, out, _ = call(capsys, "density", "--kind", "physicsq", "--q", "1.5", "--n", "1", "--points", "41", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"] == ["x", "density"]
    assert len(doc["data"]) == 41
    meta = doc["metadata"]
    assert meta["spec"] == {"kind": "physicsq", "q": 1.5}
    assert meta["N"] == 400 and meta["method"] == "stieltjes" and meta["eta"] > 0
    assert 0.98 <= meta["normalization"] <= 1.02


def test_levels_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("DEFQUAD_LEVELS", "64")
    code, out, _ = call(capsys, "density", "--points", "5", "--format", "json")
    assert code == 0 and json.loads(out)["metadata"]["N"] == 64


def test_overflow_exit_one(capsys):
    code, _, err = call(capsys, "polys", "--n", "300", "--x-min", "1e5", "--x-max", "2e5", "--points", "2")
    assert code == 1 and "OverflowError" in err


def test_unwritable_output_exit_one(capsys, tmp_path):
    target = tmp_path / "missing" / "out.csv"
    code, _, err = call(capsys, "brackets", "--output", str(target))
    assert code == 1 and err


def test_csv_format_rules(capsys):
    code, out, _ = call(capsys, "wavefunction", "--n", "3", "--theta", "0.4", "--points", "9")
    assert code == 0
    assert "\r" not in out and out.endswith("\n")
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert rows[0] == "x,re,im,abs2"
    for row in rows[1:]:
        for field in row.split(","):
            float(field)
            mantissa = field.split("e")[0].lstrip("-").replace(".", "").lstrip("0")
            assert len(mantissa) <= 12


def test_render_csv_normalises_negative_zero():
    text = render_csv(["a"], [(-0.0,)], {})
    assert text == "a\n0\n"


def test_figure_panels(tmp_path, capsys):
    code, _, _ = call(capsys, "figure", "--outdir", str(tmp_path))
    assert code == 0
    for panel, first_cols in {
        "1a": "x,harmonic,q0.90,q0.80,q0.30",
        "2b": "x,harmonic,q1.1,q1.5,q1.9",
        "3a": "x,harmonic,p1.3q0.5,p1.5q0.5,p1.9q0.5",
    }.items():
        lines = (tmp_path / f"fig{panel}.csv").read_text().splitlines()
        body = [l for l in lines if not l.startswith("#")]
        assert body[0] == first_cols
        data = np.array([[float(v) for v in l.split(",")] for l in body[1:]])
        assert data.shape == (801, 5)
        assert data[0, 0] == -4 and data[-1, 0] == 4
    meta = [l for l in (tmp_path / "fig2b.csv").read_text().splitlines() if l.startswith("# n:")]
    assert meta == ["# n: 1"]


def test_figure_files_byte_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert call(capsys, "figure", "--which", "3b", "--outdir", str(tmp_path / d))[0] == 0
    assert (tmp_path / "a" / "fig3b.csv").read_bytes() == (tmp_path / "b" / "fig3b.csv").read_bytes()


def test_outputs_byte_deterministic_across_processes(tmp_path):
    argv = [sys.executable, "-m", "defquad.cli", "density", "--kind", "pq", "--p", "1.3", "--q", "0.5", "--points", "101"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a


def test_figure_caption_families():
    assert [n for n, _ in FIGURES["1"]] == ["harmonic", "q0.90", "q0.80", "q0.30"]
    assert [s.q for _, s in FIGURES["2"][1:]] == [1.1, 1.5, 1.9]
    assert [(s.p, s.q) for _, s in FIGURES["3"][1:]] == [(1.3, 0.5), (1.5, 0.5), (1.9, 0.5)]
