import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from lorenzpp.cli import (
    EXIT_BAD_CONFIG,
    EXIT_NEGATIVE,
    EXIT_NON_NUMERIC,
    EXIT_PAIRED_LENGTH,
    EXIT_UNKNOWN_SPEC,
    EXIT_UNREADABLE,
    main,
)
from lorenzpp.special import analytic_lpp_weibull_exp
from lorenzpp.streams import stream


@pytest.fixture
def files(tmp_path):
    rng = stream(21, 0)
    x = tmp_path / "x.csv"
    y = tmp_path / "y.csv"
    pairs = tmp_path / "pairs.csv"
    np.savetxt(x, rng.exponential(size=80))
    np.savetxt(y, rng.weibull(1.3, size=60))
    np.savetxt(pairs, rng.exponential(size=(40, 2)), delimiter=",")
    return tmp_path, str(x), str(y), str(pairs)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestTestCommand:
    def test_outputs_json(self, capsys, files):
        _, x, y, _ = files
        code, out, _ = run(capsys, "test", "--x", x, "--y", y, "--boot", "50")
        assert code == 0
        data = json.loads(out)
        assert data["schema"] == 1 and data["stat"] == "tinf" and data["K"] == 50

    def test_identical_files_accept(self, capsys, files):
        _, x, _, _ = files
        code, out, _ = run(capsys, "test", "--x", x, "--y", x, "--boot", "100")
        assert code == 0
        assert json.loads(out)["reject"] is False

    def test_theta_one_same_as_plain(self, capsys, files):
        _, x, y, _ = files
        _, plain, _ = run(capsys, "test", "--x", x, "--y", y, "--boot", "60")
        _, powered, _ = run(capsys, "test", "--x", x, "--y", y, "--boot", "60", "--theta", "1")
        assert plain == powered

    def test_seed_determinism(self, capsys, files):
        _, x, y, _ = files
        first = run(capsys, "test", "--x", x, "--y", y, "--boot", "60", "--seed", "42")[1]
        second = run(capsys, "test", "--x", x, "--y", y, "--boot", "60", "--seed", "42")[1]
        assert first == second

    @pytest.mark.parametrize("extra", [["--stat", "t1"], ["--stat", "tp:2"], ["--fsd"], ["--stat", "ksb3", "--order", "1"]])
    def test_variants(self, capsys, files, extra):
        _, x, y, _ = files
        code, out, _ = run(capsys, "test", "--x", x, "--y", y, "--boot", "30", *extra)
        assert code == 0 and "pvalue" in json.loads(out)

    def test_paired_two_columns(self, capsys, files):
        _, _, _, pairs = files
        code, out, _ = run(capsys, "test", "--x", pairs, "--paired", "--boot", "30")
        assert code == 0 and json.loads(out)["scheme"] == "paired"

    def test_error_codes(self, capsys, caplog, files):
        tmp, x, y, _ = files
        (tmp / "bad.csv").write_text("1.0\nabc\n")
        (tmp / "neg.csv").write_text("1.0\n-3\n")
        assert run(capsys, "test", "--x", str(tmp / "missing.csv"), "--y", y)[0] == EXIT_UNREADABLE
        assert run(capsys, "test", "--x", str(tmp / "bad.csv"), "--y", y)[0] == EXIT_NON_NUMERIC
        assert run(capsys, "test", "--x", str(tmp / "neg.csv"), "--y", y)[0] == EXIT_NEGATIVE
        code, out, err = run(capsys, "test", "--x", x, "--y", y, "--paired")
        assert code == EXIT_PAIRED_LENGTH
        assert out == "" and "paired" in caplog.text

    def test_error_codes_distinct(self):
        codes = [EXIT_UNREADABLE, EXIT_NON_NUMERIC, EXIT_NEGATIVE, EXIT_PAIRED_LENGTH, EXIT_UNKNOWN_SPEC, EXIT_BAD_CONFIG]
        assert len(set(codes)) == len(codes)


class TestSimulateCommand:
    def test_smoke(self, capsys, tmp_path):
        code, out, _ = run(capsys, "simulate", "--spec", "table1", "--runs", "4", "--boot", "20", "--n", "50", "--out", str(tmp_path))
        assert code == 0
        assert out.startswith("table1 n=50")
        assert len(list(tmp_path.glob("table1_*.csv"))) == 1

    def test_workers_identical_bytes(self, capsys, tmp_path):
        args = ["simulate", "--spec", "table4", "--runs", "4", "--boot", "20", "--n", "40"]
        run(capsys, *args, "--out", str(tmp_path / "a"), "--workers", "1")
        run(capsys, *args, "--out", str(tmp_path / "b"), "--workers", "3")
        (a,) = (tmp_path / "a").glob("*.csv")
        (b,) = (tmp_path / "b").glob("*.csv")
        assert a.name == b.name and a.read_bytes() == b.read_bytes()

    def test_custom_config_mixture(self, capsys, tmp_path):
        config = {
            "schema": 1,
            "name": "mixture",
            "f": {"family": "lognormal_mixture", "weights": [0.9, 0.1], "components": [[0.85, 0.4], [0.4, 0.4]]},
            "g": {"family": "lognormal", "meanlog": 0.86, "sdlog": 0.6},
            "n_list": [40],
            "mc_runs": 3,
            "replicates": 20,
        }
        path = tmp_path / "custom.json"
        path.write_text(json.dumps(config))
        code, _, _ = run(capsys, "simulate", "--config", str(path), "--out", str(tmp_path / "out"))
        assert code == 0
        (csv_file,) = (tmp_path / "out").glob("mixture_*.csv")
        header = csv_file.read_text().splitlines()[0].split(",")
        assert any(h.startswith("forward_") for h in header) and any(h.startswith("reverse_") for h in header)

    def test_unknown_spec(self, capsys):
        assert run(capsys, "simulate", "--spec", "table99")[0] == EXIT_UNKNOWN_SPEC

    def test_invalid_config(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"schema": 1, "name": "x"}))
        assert run(capsys, "simulate", "--config", str(path))[0] == EXIT_BAD_CONFIG
        path.write_text("{not json")
        assert run(capsys, "simulate", "--config", str(path))[0] == EXIT_BAD_CONFIG


class TestCurvesCommand:
    def read(self, out):
        return list(csv.DictReader(io.StringIO(out)))

    def test_analytic_weibull(self, capsys):
        code, out, _ = run(capsys, "curves", "--dist-f", "weibull:2,1.5", "--dist-g", "exp", "--grid", "11")
        rows = self.read(out)
        assert code == 0 and len(rows) == 11
        p = np.array([float(r["p"]) for r in rows])
        lpp = np.array([float(r["lpp"]) for r in rows])
        np.testing.assert_allclose(lpp, analytic_lpp_weibull_exp(2.0, 1.5, p))
        assert np.all(lpp >= p)

    def test_theta_blocks(self, capsys):
        _, out, _ = run(capsys, "curves", "--dist-f", "weibull:2,1.5", "--dist-g", "exp", "--grid", "5", "--theta", "1,2,5,10", "--sample-size", "500")
        thetas = [r["theta"] for r in self.read(out)]
        assert thetas == ["1"] * 5 + ["2"] * 5 + ["5"] * 5 + ["10"] * 5

    def test_identical_samples(self, capsys, files):
        _, x, _, _ = files
        n = len(np.loadtxt(x))
        _, out, _ = run(capsys, "curves", "--x", x, "--y", x, "--grid", str(n + 1))
        rows = self.read(out)
        for r in rows[1:]:
            assert float(r["lpp"]) == pytest.approx(float(r["identity"]))


def test_module_entry_point_stdout_is_json(files):
    _, x, y, _ = files
    proc = subprocess.run(
        [sys.executable, "-m", "lorenzpp", "test", "--x", x, "--y", y, "--boot", "20"],
        capture_output=True, text=True, check=True,
    )
    json.loads(proc.stdout)
