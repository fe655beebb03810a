import subprocess
import sys

import pytest

from causalfc.cli import bench_rows, main
from causalfc.touchstone_io import parse_report_csv, read_touchstone


@pytest.fixture
def run(tmp_path, capsys):
    def _run(*argv):
        code = main([str(a) for a in argv])
        out = capsys.readouterr()
        return code, out.out, out.err

    return _run


def test_generate_two_pole_n(run, tmp_path):
    path = tmp_path / "tp.s1p"
    assert run("generate", "two-pole", "--n", 100, "--output", path)[0] == 0
    net = read_touchstone(path)
    assert net.freqs.size == 100 and net.freqs[0] == 0 and net.freqs[-1] == 6.0


def test_generate_line_band(run, tmp_path):
    path = tmp_path / "line.s1p"
    run("generate", "line", "--output", path)
    f = read_touchstone(path).freqs
    assert 0 < f[0] and f[-1] == 5e9


def test_generate_to_stdout_and_csv(run, tmp_path):
    code, out, _ = run("generate", "two-pole", "--n", 10, "--format", "MA")
    assert code == 0 and out.startswith("# Hz S MA R 50")
    run("generate", "two-pole", "--n", 10, "--output", tmp_path / "tp.csv")
    assert "x,re,im" in (tmp_path / "tp.csv").read_text()


def test_check_clean_two_pole(run, tmp_path):
    src, rep, err = tmp_path / "tp.s1p", tmp_path / "r.csv", tmp_path / "e.csv"
    run("generate", "two-pole", "--output", src)
    code, out, _ = run("check", "--input", src, "--report", rep, "--errors-csv", err)
    assert code == 0 and "causal_within_tolerance" in out
    items = parse_report_csv(rep.read_text())
    assert items["verdict"] == "causal_within_tolerance"
    assert items["b"] == "4" and "b_sweep" in items
    assert len(err.read_text().splitlines()) == 2 + int(items["N"])


def test_check_gaussian_violation(run, tmp_path):
    src, rep = tmp_path / "g.s1p", tmp_path / "r.csv"
    run("generate", "two-pole", "--gauss-a", "1e-8", "--output", src)
    code, out, _ = run("check", "--input", src, "--report", rep)
    assert code == 2
    locs = [float(v) for v in parse_report_csv(rep.read_text())["violation_locations"].split(";")]
    assert sorted(locs[:2]) == pytest.approx([-0.1, 0.1], abs=2e-3)


def test_check_delayed_gaussian_causal(run, tmp_path):
    src = tmp_path / "dg.s1p"
    run("generate", "delayed-gaussian", "--td-over-sigma", 6, "--output", src)
    assert run("check", "--input", src)[0] == 0


def test_check_missing_file(run, tmp_path):
    code, _, err = run("check", "--input", tmp_path / "nope.s1p")
    assert code == 1 and "nope.s1p" in err


def test_bad_port_is_operational_error(run, tmp_path):
    src = tmp_path / "tp.s1p"
    run("generate", "two-pole", "--n", 20, "--output", src)
    assert run("check", "--input", src, "--port", "2,1")[0] == 1
    assert run("check", "--input", src, "--port", "x")[0] == 1


def test_flags_echoed_and_deterministic(run, tmp_path):
    src = tmp_path / "tp.s1p"
    run("generate", "two-pole", "--n", 101, "--output", src)
    reports = []
    for name in ("a.csv", "b.csv"):
        run("check", "--input", src, "--extension", 3, "--xi", "1e-12", "--xi-mode", "relative",
            "--formulation", "complex", "--modes", 80, "--report", tmp_path / name)
        reports.append((tmp_path / name).read_text())
    assert reports[0] == reports[1]
    items = parse_report_csv(reports[0])
    assert (items["b"], items["xi"], items["xi_mode"], items["formulation"], items["M"]) == (
        "3", "1e-12", "relative", "complex_system", "80")
    assert "b_sweep" not in items


def test_sweep_command(run, tmp_path):
    src = tmp_path / "tp.s1p"
    run("generate", "two-pole", "--n", 201, "--output", src)
    code, out, _ = run("sweep", "--input", src, "--extension", 4)
    assert code == 0 and "fit: error" in out and out.count("\n") >= 6


def test_bench_rows():
    rows = bench_rows([50, 250, 500])
    assert [r[1] for r in rows] == [50, 250, 500]
    assert all(t > 0 for r in rows for t in r[2:])
    assert rows[0][4] < rows[-1][4]


def test_bench_command(run):
    code, out, _ = run("bench", "--modes", 50, 250)
    assert code == 0 and "   250" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "causalfc", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("causalfc")
