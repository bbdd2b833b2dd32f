import csv
import io
import json
import subprocess
import sys

import pytest

from oscexp import __version__, closedform, oscquad
from oscexp.cli import EXIT_OK, EXIT_USAGE, UsageError, main, parse_floats, to_json
from oscexp.symlin import PhaseParameters, SymmetricMatrix


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


class TestLiterals:
    def test_position_in_error(self):
        with pytest.raises(UsageError, match=r"element 2 \('x'\)"):
            parse_floats("1,x,3", "matrix")

    def test_non_finite(self):
        with pytest.raises(UsageError, match="not finite"):
            parse_floats("1,inf", "b")

    def test_json_precision(self):
        assert json.loads(to_json({"x": 0.1 + 0.2}))["x"] == 0.1 + 0.2
        assert to_json(float("nan")) == "null"
        assert json.loads(to_json(1 + 2j)) == {"re": 1.0, "im": 2.0}


class TestEval:
    def test_zero_phase_on_cube(self, capsys):
        code, out, _ = run(capsys, "eval", "--k", "2")
        rec = json.loads(out)
        assert code == EXIT_OK
        assert rec["value"]["re"] == pytest.approx(1.0, abs=1e-14) and rec["converged"]

    def test_matches_library_bit_for_bit(self, capsys):
        code, out, _ = run(capsys, "eval", "--k", "2", "--matrix", "3,-1.5,7", "--b", "0.5,2", "--tol", "1e-10")
        prm = PhaseParameters(SymmetricMatrix(2, (3.0, -1.5, 7.0)), (0.5, 2.0))
        lib = oscquad.t_box(prm, oscquad.Region.unit_cube(2), oscquad.QuadratureBudget.default_for(2, 1e-10))
        rec = json.loads(out)
        assert complex(rec["value"]["re"], rec["value"]["im"]) == lib.value

    def test_closed_form(self, capsys):
        code, out, _ = run(capsys, "eval", "--k", "1", "--matrix", "0.5", "--b", "1", "--closed-form")
        rec = json.loads(out)
        lib = closedform.t_infinity(PhaseParameters(SymmetricMatrix(1, (0.5,)), (1.0,)))
        assert complex(rec["value"]["re"], rec["value"]["im"]) == lib

    def test_box_region(self, capsys):
        code, out, _ = run(capsys, "eval", "--k", "1", "--region", "box", "--lower", "-1", "--upper", "2")
        assert json.loads(out)["value"]["re"] == pytest.approx(3.0)

    @pytest.mark.parametrize("argv,msg", [
        (["eval"], "--k is required"),
        (["eval", "--k", "2", "--matrix", "1,2"], "expected 3 packed entries"),
        (["eval", "--k", "2", "--matrix", "1,x,3"], "element 2"),
        (["eval", "--k", "1", "--region", "ball"], "cube or box"),
        (["eval", "--k", "1", "--seed", "-1"], "64-bit"),
        (["eval", "--k", "1", "--threads", "-2"], "non-negative"),
    ])
    def test_usage_errors(self, capsys, argv, msg):
        code, _, err = run(capsys, *argv)
        assert code == EXIT_USAGE
        assert msg in err

    def test_unknown_subcommand(self, capsys):
        code, _, _ = run(capsys, "integrate")
        assert code == EXIT_USAGE


class TestConfig:
    def test_unknown_key_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"k": 1, "cutofs": "1,2"}))
        code, _, err = run(capsys, "threshold-scan", "--config", str(cfg))
        assert code == EXIT_USAGE and "cutofs" in err

    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"k": 1, "p-grid": "3.5,4.5", "seed": 5}))
        code, out, _ = run(capsys, "threshold-scan", "--config", str(cfg), "--seed", "9")
        rec = json.loads(out)
        assert rec["config"]["seed"] == 9 and rec["config"]["p_grid"] == "3.5,4.5"
        assert code == EXIT_OK

    def test_threads_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("OSCEXP_THREADS", "3")
        _, out, _ = run(capsys, "threshold-scan", "--k", "1")
        assert json.loads(out)["config"]["threads"] == 3
        monkeypatch.setenv("OSCEXP_THREADS", "many")
        code, _, _ = run(capsys, "threshold-scan", "--k", "1")
        assert code == EXIT_USAGE


class TestRecords:
    def test_json_record_shape(self, capsys):
        code, out, _ = run(capsys, "threshold-scan", "--k", "1")
        rec = json.loads(out)
        assert set(rec) == {"experiment", "timestamp", "config", "rows", "verdicts", "version"}
        assert rec["version"] == __version__ and rec["experiment"] == "threshold-scan"
        assert all(v["ok"] for v in rec["verdicts"].values())

    def test_csv_output(self, capsys, tmp_path):
        path = tmp_path / "out.csv"
        code, out, _ = run(capsys, "threshold-scan", "--k", "1", "--out", str(path))
        assert code == EXIT_OK and out == ""
        rows = list(csv.reader(io.StringIO(path.read_text())))
        assert rows[0] == ["experiment", "k", "mode", "p", "a11", "slice", "estimate", "stderr", "exponent_fit",
                           "r2", "verdict", "seed"]
        assert all(r[0] == "threshold-scan" for r in rows[1:])

    def test_thread_count_does_not_change_results(self, capsys):
        args = ["closed-form-check", "--k", "1,2", "--trials", "12", "--seed", "4"]
        _, one, _ = run(capsys, *args, "--threads", "1")
        _, four, _ = run(capsys, *args, "--threads", "4")
        assert json.loads(one)["rows"] == json.loads(four)["rows"]

    def test_exploratory_scan_never_fails(self, capsys):
        code, out, _ = run(capsys, "small-square-scan")
        rec = json.loads(out)
        assert code == EXIT_OK
        assert all(not v["gating"] for v in rec["verdicts"].values())

    def test_console_script(self):
        proc = subprocess.run([sys.executable, "-m", "oscexp.cli", "--version"], capture_output=True, text=True)
        assert proc.returncode == 0 and __version__ in proc.stdout
