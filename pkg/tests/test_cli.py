import json

import numpy as np
import pytest

from nongauss import make_fock, save_state
from nongauss.cli import main
from nongauss.figures import parse_range


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCompute:
    def test_fock_one(self, capsys):
        code, out, _ = run(capsys, "compute", "--family", "fock", "--p", "1")
        assert code == 0
        assert "0.41666" in out

    def test_thermal_json_format(self, capsys):
        code, out, _ = run(capsys, "compute", "--family", "thermal",
                           "--n-t", "2", "--format", "json")
        assert code == 0
        record = json.loads(out)
        assert abs(record["delta"]) <= 1e-6
        assert record["flags"] == []

    def test_state_file(self, capsys, tmp_path):
        path = tmp_path / "fock1.json"
        save_state(make_fock(1, 6), path)
        code, out, _ = run(capsys, "compute", "--state", str(path))
        assert code == 0
        assert "0.41666" in out

    def test_bad_state_file_exit_code(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        doc = {"version": 1, "modes": 1, "cutoffs": [2],
               "matrix": [[[0.9, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
               "metadata": {}}
        path.write_text(json.dumps(doc))
        code, _, err = run(capsys, "compute", "--state", str(path))
        assert code == 2
        assert "validation" in err

    def test_family_and_state_exclusive(self, capsys, tmp_path):
        path = tmp_path / "x.json"
        save_state(make_fock(1, 4), path)
        code, _, err = run(capsys, "compute", "--family", "fock",
                           "--state", str(path))
        assert code == 2


class TestFigure:
    def test_loss_figure(self, capsys, tmp_path):
        out_dir = tmp_path / "figs"
        code, out, _ = run(capsys, "figure", "f3-left", "--out", str(out_dir))
        assert code == 0
        csv = out_dir / "f3-left.csv"
        assert csv.exists()
        assert (out_dir / "f3-left.png").exists()
        lines = [l for l in csv.read_text().splitlines() if not l.startswith("#")]
        header = lines[0].split(",")
        assert header[0] == "one_minus_eta"
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == pytest.approx(5.0 / 12.0, abs=1e-6)

    def test_figure_deterministic(self, capsys, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        run(capsys, "figure", "f1-top", "--out", str(a_dir), "--no-plot")
        run(capsys, "figure", "f1-top", "--out", str(b_dir), "--no-plot")
        assert (a_dir / "f1-top.csv").read_bytes() == (b_dir / "f1-top.csv").read_bytes()

    def test_f2_small_run(self, capsys, tmp_path):
        out_dir = tmp_path / "figs"
        code, _, _ = run(capsys, "figure", "f2", "--out", str(out_dir),
                         "--samples", "8", "--seed", "1", "--no-plot")
        assert code == 0
        assert (out_dir / "f2.csv").exists()
        summary = (out_dir / "f2-summary.csv").read_text()
        assert summary.splitlines()[1].startswith("#") is False


class TestSweep:
    def test_loss_sweep_monotone(self, capsys, tmp_path):
        out = tmp_path / "loss.csv"
        code, _, _ = run(capsys, "sweep", "--family", "loss", "--p", "2",
                         "--eta-range", "0.1:0.9:0.1", "--out", str(out))
        assert code == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert len(lines) == 10
        deltas = [float(l.split(",")[2]) for l in lines[1:]]
        assert all(b > a for a, b in zip(deltas, deltas[1:]))

    def test_empty_range(self, capsys, tmp_path):
        out = tmp_path / "empty.csv"
        code, _, _ = run(capsys, "sweep", "--family", "loss", "--p", "1",
                         "--eta-range", "0.9:0.1:0.1", "--out", str(out))
        assert code == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert len(lines) == 1  # header only

    def test_parallel_equals_serial(self, capsys, tmp_path):
        serial = tmp_path / "serial.csv"
        parallel = tmp_path / "parallel.csv"
        args = ["sweep", "--family", "cat", "--alpha", "0.5",
                "--phi-range=-1.2:1.2:0.4"]
        run(capsys, *args, "--out", str(serial))
        run(capsys, *args, "--parallelism", "4", "--out", str(parallel))
        assert serial.read_bytes() == parallel.read_bytes()

    def test_ips_sweep(self, capsys, tmp_path):
        out = tmp_path / "ips.csv"
        code, _, _ = run(capsys, "sweep", "--family", "ips",
                         "--t-range", "0.2:0.8:0.3", "--efficiency", "0.8",
                         "--r", "0.5", "--out", str(out))
        assert code == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        deltas = [float(l.split(",")[3]) for l in lines[1:]]
        assert all(b > a for a, b in zip(deltas, deltas[1:]))


def test_parse_range():
    assert parse_range("0.5") == [0.5]
    vals = parse_range("0.1:0.9:0.1")
    assert len(vals) == 9
    assert vals[0] == pytest.approx(0.1)
    assert vals[-1] == pytest.approx(0.9)
    assert parse_range("1.0:0.5:0.1") == []
