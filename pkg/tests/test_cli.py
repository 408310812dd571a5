import csv
import io
import json
import os
import subprocess
import sys

import pytest

from linchar import cli

KEYS = set(cli.REPORT_KEYS)


def run(capsys, *argv):
    try:
        status = cli.main(list(argv))
    except SystemExit as exc:
        status = exc.code
    out, err = capsys.readouterr()
    return status, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestVerify:
    def test_two_point_t1(self, capsys):
        status, out, _ = run(capsys, "verify", "--theorem", "t1", "--family", "two-point",
                             "--a", "1", "--n", "100000", "--seed", "7")
        report = json.loads(out)
        assert status == 0 and set(report) == KEYS
        assert report["reject"] is False and report["seed"] == 7

    def test_gaussian_assert(self, capsys):
        status, out, _ = run(capsys, "verify", "--theorem", "t1", "--family", "gaussian",
                             "--assert")
        assert status == 0 and json.loads(out)["reject"] is True

    def test_assert_failure(self, capsys):
        # a two-point law is not uniform: the uniform identity must reject, so
        # --assert passes; asking it of the uniform law itself must not reject
        status, _, _ = run(capsys, "verify", "--theorem", "t3", "--family", "uniform",
                           "--assert", "--n", "5000")
        assert status == 0
        status, _, _ = run(capsys, "verify", "--theorem", "t1", "--family", "gaussian",
                           "--assert", "--n", "5", "--seed", "1")
        assert status == 3

    def test_invalid_n(self, capsys):
        status, _, err = run(capsys, "verify", "--theorem", "t2", "--family", "two-point",
                             "--n", "0")
        assert status == 2 and "--n" in err

    def test_independence_csv(self, capsys):
        status, out, _ = run(capsys, "verify", "--theorem", "t2", "--family", "two-point",
                             "--n", "2000", "--replicates", "99", "--format", "csv")
        table = rows(out)
        assert status == 0 and table[0] == list(cli.REPORT_KEYS) and len(table) == 2

    def test_cf_method(self, capsys):
        status, out, _ = run(capsys, "verify", "--theorem", "t1a", "--order", "4",
                             "--family", "two-point", "--n", "2000", "--method", "cf",
                             "--replicates", "99")
        report = json.loads(out)
        assert status == 0 and report["config"]["test"] == "cf_equality_permutation"

    @pytest.mark.parametrize("argv", [["--alpha", "1.5"], ["--replicates", "10"],
                                      ["--seed", "-1"], ["--scale", "0"],
                                      ["--family", "cauchy"]])
    def test_usage_errors(self, capsys, argv):
        base = ["verify", "--theorem", "t1", "--family", "two-point"]
        status, _, _ = run(capsys, *(base + argv))
        assert status == 2


class TestGof:
    def test_uniform(self, capsys):
        status, out, _ = run(capsys, "gof", "--theorem", "t3", "--family", "uniform",
                             "--n", "3000", "--replicates", "99", "--assert")
        report = json.loads(out)
        assert status == 0 and set(report) == KEYS
        assert report["config"]["null_family"] == "uniform"

    def test_gaussian_rejected(self, capsys):
        status, out, _ = run(capsys, "gof", "--theorem", "t1", "--family", "gaussian",
                             "--n", "3000", "--replicates", "99", "--assert")
        assert status == 0 and json.loads(out)["reject"] is True


class TestResidual:
    def test_eq2_two_point(self, capsys):
        status, out, _ = run(capsys, "residual", "--equation", "eq2", "--family",
                             "two-point", "--assert")
        table = rows(out)
        assert status == 0 and table[0] == ["t", "residual"]
        assert max(abs(float(r[1])) for r in table[1:]) < 1e-13

    def test_eq31_sech_nonzero(self, capsys):
        status, out, _ = run(capsys, "residual", "--equation", "eq31", "--family", "sech2",
                             "--assert")
        assert status == 0
        assert max(abs(float(r[1])) for r in rows(out)[1:]) > 1e-3

    def test_eqt4_sech(self, capsys):
        status, out, _ = run(capsys, "residual", "--equation", "eqt4", "--family", "sech2",
                             "--format", "json", "--assert")
        assert status == 0 and json.loads(out)["statistic"] < 1e-13

    def test_empirical_has_se(self, capsys):
        status, out, _ = run(capsys, "residual", "--equation", "eq31", "--family", "uniform",
                             "--empirical", "--n", "1000")
        assert status == 0 and rows(out)[0] == ["t", "residual", "se"]

    def test_eq21_grid(self, capsys):
        status, out, _ = run(capsys, "residual", "--equation", "eq21", "--family",
                             "two-point", "--grid-points", "17", "--t-max", "4")
        assert status == 0 and rows(out)[0] == ["s", "t", "residual"]

    def test_bad_equation(self, capsys):
        status, _, _ = run(capsys, "residual", "--equation", "eq99", "--family", "uniform")
        assert status == 2


class TestSolveAndProduct:
    def test_defaults(self, capsys):
        status, out, err = run(capsys, "solve", "--assert")
        table = rows(out)
        assert status == 0 and table[0] == ["t", "K", "cos", "abs_err"]
        assert max(float(r[3]) for r in table[1:]) < 1e-8
        assert err.startswith("# max_abs_error=")

    def test_t_max_zero(self, capsys):
        status, _, _ = run(capsys, "solve", "--t-max", "0")
        assert status == 2

    def test_shallow_depth(self, capsys):
        status, _, _ = run(capsys, "solve", "--depth", "3")
        assert status == 2

    def test_product(self, capsys):
        status, out, _ = run(capsys, "product", "--a", "2", "--format", "json", "--assert")
        report = json.loads(out)
        assert status == 0 and set(report) == KEYS and report["statistic"] < 1e-10

    def test_sample_csv(self, capsys):
        status, out, _ = run(capsys, "sample", "--family", "two-point", "--a", "2",
                             "--n", "20")
        table = rows(out)
        assert status == 0 and len(table) == 21
        assert {float(r[0]) for r in table[1:]} <= {-2.0, 2.0}

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "k.csv"
        status, out, _ = run(capsys, "solve", "--out", str(path))
        assert status == 0 and out == "" and path.read_text().startswith("t,K,cos")


def strip_runtime(text):
    report = json.loads(text)
    report.pop("runtime_ms")
    return report


@pytest.mark.parametrize("argv", [
    ["verify", "--theorem", "t2", "--family", "uniform", "--n", "3000",
     "--replicates", "99", "--seed", "11"],
    ["gof", "--theorem", "t4", "--family", "sech2", "--n", "2000", "--replicates", "99"],
])
def test_byte_identical_across_workers(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv, "--workers", "4")
    assert strip_runtime(first) == strip_runtime(second)


def test_module_entry_point_determinism():
    argv = [sys.executable, "-m", "linchar", "verify", "--theorem", "t1", "--family",
            "sech2", "--n", "5000", "--method", "cf", "--replicates", "99", "--seed", "3"]
    outs = []
    for threads in ("1", "4"):
        env = dict(os.environ, OMP_NUM_THREADS=threads, OPENBLAS_NUM_THREADS=threads)
        proc = subprocess.run(argv, capture_output=True, text=True, env=env, check=True)
        outs.append(strip_runtime(proc.stdout))
    assert outs[0] == outs[1]
