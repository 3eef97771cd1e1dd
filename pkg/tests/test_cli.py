import json
import re
import subprocess
import sys

import pytest

from ratlaws import corpus
from ratlaws.cli import fmt, run
from ratlaws.laws import LawKind, LimitLaw
from ratlaws.svgplot import emit_svg_plot, render_svg
from ratlaws.verify import ConvergenceReport, convergence_report


@pytest.fixture()
def fig1_file(tmp_path):
    p = tmp_path / "fig1.json"
    p.write_text(corpus.text("fig1"))
    return str(p)


def test_fmt():
    assert fmt(1 / 3) == "0.333333333333 (≈ 1/3)"
    assert fmt(2 / 27) == "0.0740740740741 (≈ 2/27)"
    assert fmt(2.0) == "2"
    assert fmt(0.048) == "0.048"
    assert fmt(1 / 3 + 1e-6) == "0.333334333333"
    assert fmt(1 / 67) == f"{1 / 67:.12g}"


def test_classify_fig1(fig1_file):
    out = run(["classify", fig1_file])
    assert out.exit_code == 0
    assert "class: EquipotentCommunicating(BetaDiffer)" in out.stdout
    assert "lambda = 2\n" in out.stdout
    assert "beta   = 0.333333333333 (≈ 1/3)" in out.stdout
    assert "beta   = 0.666666666667 (≈ 2/3)" in out.stdout
    assert out.stdout.count("] d = 1, period = 1") == 2
    assert "law: Uniform(b1=0.333333333333 (≈ 1/3), b2=0.666666666667 (≈ 2/3))" in out.stdout


def test_classify_fig2():
    out = run(["classify", "corpus:fig2"])
    assert out.exit_code == 0
    assert "class: EquipotentSum(BetaDiffer)" in out.stdout
    assert "alpha  = 0.666666666667 (≈ 2/3)" in out.stdout
    assert "alpha  = 1.33333333333 (≈ 4/3)" in out.stdout
    assert out.stdout.count("gamma  = 0.0740740740741 (≈ 2/27)") == 2
    assert "law: GaussMix(p=0.333333333333 (≈ 1/3)" in out.stdout


def test_classify_unsupported_exits_1():
    out = run(["classify", "corpus:periodic_pair"])
    assert out.exit_code == 1
    assert "Unsupported" in out.stdout and "no local law" in out.stdout


def test_classify_tol_flag():
    # a loose tolerance merges the two distinct gammas of the tmix model
    out = run(["classify", "corpus:tmix", "--tol-eq", "0.5"])
    assert "BetaGammaEqual" in out.stdout


def test_constants():
    out = run(["constants", "corpus:fig1"])
    assert out.exit_code == 0
    assert out.stdout.count("lambda = 2\n") == 2
    assert "finite differences" in out.stdout


def test_missing_file():
    out = run(["dist", "missing.json", "-n", "10"])
    assert out.exit_code == 1
    assert "not found" in out.stderr


def test_bad_model_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"size": 2,')
    out = run(["classify", str(p)])
    assert out.exit_code == 1 and "syntax error" in out.stderr


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate", "x"],
    ["dist", "corpus:fig1"],
    ["dist", "corpus:fig1", "-n", "0"],
    ["dist", "corpus:fig1", "-n", "ten"],
    ["verify", "corpus:fig1", "--grid", "10,x"],
    ["verify", "corpus:fig1", "--grid", "10,20,30", "--band", "1,0"],
    ["sample", "corpus:fig1", "-n", "3", "--count", "10"],
    ["classify", "corpus:fig1", "--tol-eq", "-1"],
])
def test_usage_errors(argv):
    out = run(argv)
    assert out.exit_code == 2
    assert "error" in out.stderr


def test_unknown_corpus_name():
    out = run(["classify", "corpus:nope"])
    assert out.exit_code == 1 and "unknown corpus model" in out.stderr


def test_dist_stdout_and_csv(tmp_path):
    out = run(["dist", "corpus:fig1", "-n", "2"])
    assert out.stdout == "k,p\n0,0.5\n1,0.5\n2,0.0\n"
    target = tmp_path / "d.csv"
    out = run(["dist", "corpus:binomial", "-n", "4", "--csv", str(target)])
    assert out.exit_code == 0 and out.artifacts == [str(target)]
    assert target.read_text().splitlines()[0] == "k,p"
    assert "mean = 2" in out.stdout


def test_dist_n0_refused():
    out = run(["dist", "corpus:binomial", "-n", "0"])
    assert out.exit_code == 2


def test_verify_artifacts(tmp_path):
    rep, svg = tmp_path / "r.json", tmp_path / "r.svg"
    out = run(["verify", "corpus:fig2", "--grid", "100,200,400,800", "--report", str(rep), "--svg", str(svg)])
    assert out.exit_code == 0
    report = ConvergenceReport.from_json(rep.read_text())
    assert len(report.entries) == 4
    text = svg.read_text()
    assert text.count("<circle") == 4 and text.count("<line") == 1
    assert f"slope = {report.fitted_slope:.3f}" in text
    assert "pass = true" in out.stdout


def test_verify_grid_too_short():
    out = run(["verify", "corpus:fig1", "--grid", "250,500"])
    assert out.exit_code == 1 and "need ≥ 3 points" in out.stderr


def test_verify_refused():
    out = run(["verify", "corpus:even_pair", "--grid", "10,20,40"])
    assert out.exit_code == 1 and "not aperiodic" in out.stderr


def test_svg_binomial_slope_annotation(tmp_path, binomial):
    report = convergence_report(binomial, (250, 500, 1000, 2000))
    path = emit_svg_plot(report, tmp_path / "b.svg")
    text = path.read_text()
    m = re.search(r"slope = (-?\d+\.\d{3})", text)
    assert m and m.group(1) == f"{report.fitted_slope:.3f}"
    assert text == render_svg(report)


def test_svg_empty_report(tmp_path):
    empty = ConvergenceReport(LimitLaw(LawKind.GAUSSIAN, (0.5, 0.25)), (), float("nan"), float("nan"), False)
    with pytest.raises(ValueError, match="empty"):
        emit_svg_plot(empty, tmp_path / "e.svg")


def test_svg_unwritable(tmp_path, binomial):
    report = convergence_report(binomial, (100, 200, 400))
    with pytest.raises(OSError):
        emit_svg_plot(report, tmp_path / "no" / "such" / "dir.svg")


def test_sample_csv():
    out = run(["sample", "corpus:fig1", "-n", "4", "--count", "100", "--seed", "1"])
    lines = out.stdout.splitlines()
    assert lines[0] == "k,count" and len(lines) == 6
    assert sum(int(line.split(",")[1]) for line in lines[1:]) == 100


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ratlaws", "classify", "corpus:binomial"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "class: Primitive" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "ratlaws", "dist", "corpus:binomial"],
                          capture_output=True, text=True)
    assert proc.returncode == 2


def test_report_json_shape(tmp_path):
    rep = tmp_path / "r.json"
    run(["verify", "corpus:binomial", "--grid", "100,200,400", "--report", str(rep)])
    obj = json.loads(rep.read_text())
    assert obj["law"]["kind"] == "Gaussian"
    assert obj["pass"] in (True, False)
    assert {"n", "D", "window"} == set(obj["entries"][0])
