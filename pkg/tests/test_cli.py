import json
import subprocess
import sys

import numpy as np
import pytest

from gek import finite_n as F
from gek import limits as L
from gek.cli import main
from gek.errors import ConvergenceError
from gek.records import CurveRecord


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    return CurveRecord.from_csv(text)


class TestDensity:
    def test_beta2_limit_line(self, tmp_path, capsys):
        path = tmp_path / "d.csv"
        code, _, _ = run(["density", "--beta", "2", "--regime", "limit", "--sigma", "1",
                          "--grid", "-6:2:81", "--y", "0", "--out", str(path)], capsys)
        assert code == 0
        rec = table(path.read_text())
        assert len(rec.rows) == 81
        assert float(rec.meta["sigma"]) == 1.0
        X, val = rec.rows[30][0], rec.rows[30][-1]
        assert val == pytest.approx(L.density_ai_b2(X, 1.0), rel=1e-12)

    def test_beta4_axis_row_is_zero(self, capsys):
        code, out, _ = run(["density", "--beta", "4", "--regime", "limit", "--sigma", "1",
                            "--grid", "-2:0:3", "--ygrid", "0:1:3"], capsys)
        assert code == 0
        rec = table(out)
        assert len(rec.rows) == 9
        assert all(r[-1] == 0 for r in rec.rows if r[1] == 0)
        assert all(r[-1] > 0 for r in rec.rows if r[1] > 0)

    def test_beta1_finite_real_channel(self, capsys):
        code, out, _ = run(["density", "--beta", "1", "--regime", "finite", "--n", "6", "--tau", "0.5",
                            "--channel", "real", "--grid", "-5:5:101", "--format", "json"], capsys)
        assert code == 0
        data = json.loads(out)
        assert len(data["rows"]) == 101
        spec = F.EnsembleSpec(1, 6, 0.5)
        for x, val in data["rows"][::10]:
            ref = -F.g_real_b1(x, x, spec).real
            assert abs(val - ref) <= 1e-12 * max(abs(ref), 1e-300)

    def test_hermitian_and_strong(self, capsys):
        code, out, _ = run(["density", "--beta", "2", "--regime", "hermitian", "--grid", "0:1:2"], capsys)
        assert code == 0
        assert table(out).rows[0][-1] == pytest.approx(L.hermitian_airy_kernel(0, 0))
        code, out, _ = run(["density", "--beta", "2", "--regime", "strong", "--grid", "0:1:2", "--y", "3"],
                           capsys)
        assert code == 0
        assert table(out).rows[0][-1] == pytest.approx(0.5 / np.pi)

    @pytest.mark.parametrize("argv", [
        ["density", "--beta", "2", "--regime", "limit", "--grid", "0:1:3"],
        ["density", "--beta", "2", "--regime", "finite", "--n", "4", "--grid", "0:1:3"],
        ["density", "--beta", "2", "--regime", "limit", "--sigma", "1", "--n", "4", "--grid", "0:1:3"],
        ["density", "--beta", "2", "--regime", "limit", "--sigma", "1", "--channel", "real", "--grid", "0:1:3"],
        ["density", "--beta", "4", "--regime", "bulk", "--sigma", "1", "--grid", "0:1:3"],
        ["density", "--beta", "2", "--regime", "limit", "--sigma", "1", "--grid", "0:1"],
        ["density", "--beta", "2", "--regime", "limit", "--sigma", "40", "--grid", "0:1:3"],
        ["density", "--beta", "3", "--regime", "limit", "--sigma", "1", "--grid", "0:1:3"],
        ["frobnicate"],
    ])
    def test_usage_errors_exit_2(self, argv, capsys):
        code, _, err = run(argv, capsys)
        assert code == 2
        assert err


class TestKernel:
    def test_limit_kernel_matches_library(self, capsys):
        code, out, _ = run(["kernel", "--beta", "2", "--regime", "limit", "--sigma", "1",
                            "--grid", "-1:0:2", "--y", "0.2", "--x2", "0.3", "--y2", "-0.1"], capsys)
        assert code == 0
        rec = table(out)
        assert rec.columns == ["X1", "Y1", "X2", "Y2", "re", "im"]
        X1, Y1, X2, Y2, re, im = rec.rows[0]
        ref = L.kernel_ai_b2(complex(X1, Y1), complex(X2, Y2), 1.0)
        assert complex(re, im) == pytest.approx(ref, rel=1e-12)

    def test_finite_kernel(self, capsys):
        code, out, _ = run(["kernel", "--beta", "2", "--regime", "finite", "--n", "5", "--tau", "0.3",
                            "--grid", "0:1:2", "--x2", "0.5"], capsys)
        assert code == 0
        X1, Y1, X2, Y2, re, im = table(out).rows[1]
        ref = F.kernel_b2(complex(X1, Y1), complex(X2, Y2), F.EnsembleSpec(2, 5, 0.3))
        assert complex(re, im) == pytest.approx(ref, rel=1e-12)

    def test_numeric_failure_exit_3(self, capsys, monkeypatch):
        def fail(*args, **kwargs):
            raise ConvergenceError("panel budget exhausted")

        monkeypatch.setattr(L, "kernel_ai_b2", fail)
        code, _, err = run(["kernel", "--beta", "2", "--regime", "limit", "--sigma", "1",
                            "--grid", "0:1:2"], capsys)
        assert code == 3
        assert "panel budget" in err


class TestCheck:
    def test_poisson_suite(self, capsys):
        code, out, _ = run(["check", "poisson"], capsys)
        assert code == 0
        rec = table(out)
        off = [r for r in rec.rows if "off" in r[1]]
        assert off and all(r[2] == 0 for r in off)
        assert all(r[4] == 1 for r in rec.rows)

    def test_bulk_suite_json(self, capsys):
        code, out, _ = run(["check", "bulk", "--format", "json"], capsys)
        assert code == 0
        assert json.loads(out)["meta"]["passed"] == 1

    def test_unknown_suite(self, capsys):
        code, _, _ = run(["check", "everything"], capsys)
        assert code == 2


class TestSample:
    args = ["sample", "--beta", "2", "--n", "40", "--sigma", "1", "--trials", "20", "--seed", "7"]

    def test_deterministic(self, capsys):
        _, first, _ = run(self.args, capsys)
        _, second, _ = run(self.args, capsys)
        assert first == second
        rec = table(first)
        assert rec.columns == ["X", "Y", "count", "density", "stat_error"]

    def test_eigenvalue_file(self, tmp_path, capsys):
        path = tmp_path / "h.csv"
        code, _, _ = run(self.args + ["--out", str(path)], capsys)
        assert code == 0
        eig = table((tmp_path / "h-eigenvalues.csv").read_text())
        assert eig.columns == ["trial", "re", "im", "channel"]
        assert len(eig.rows) == 20 * 40

    def test_compare_limit_small(self, capsys):
        code, out, _ = run(["sample", "--beta", "1", "--n", "32", "--sigma", "1", "--trials", "150",
                            "--channel", "real", "--grid", "-4:2:7", "--compare", "limit",
                            "--band-fraction", "0.0"], capsys)
        assert code == 0
        rec = table(out)
        assert rec.columns[-2:] == ["model", "z_score"]
        assert "fraction_within_3sigma" in rec.meta

    def test_band_failure_exit_3(self, capsys):
        code, _, _ = run(["sample", "--beta", "2", "--n", "20", "--tau", "0.9", "--trials", "30",
                          "--grid", "-4:2:4", "--ygrid", "-2:2:3", "--compare", "finite",
                          "--band-fraction", "1.01"], capsys)
        assert code == 3

    def test_gumbel_report(self, capsys):
        code, out, _ = run(["sample", "--beta", "1", "--n", "20", "--tau", "0", "--trials", "300",
                            "--gumbel"], capsys)
        assert code in (0, 3)
        rec = table(out)
        assert rec.columns == ["loc", "scale", "ks_statistic", "p_value", "samples"]
        assert rec.rows[0][4] == 300

    @pytest.mark.parametrize("extra", [["--tau", "0.5"], [], ["--trials", "0"]])
    def test_usage(self, extra, capsys):
        argv = ["sample", "--beta", "2", "--n", "10", "--sigma", "1"] + extra
        if not extra:
            argv = ["sample", "--beta", "2", "--n", "10"]
        code, _, _ = run(argv, capsys)
        assert code == 2

    def test_capacity_exit_3(self, capsys):
        code, _, _ = run(["sample", "--beta", "2", "--n", "600", "--tau", "0.5", "--trials", "1"], capsys)
        assert code == 3


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "gek.cli", "check", "poisson"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# beta=")
