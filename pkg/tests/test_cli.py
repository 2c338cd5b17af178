import json
import subprocess
import sys

import pytest

from pdisc.cli import main
from pdisc.io import read_mask_pbm, read_points_csv


def test_generate_csv(tmp_path, capsys):
    out = tmp_path / "p"
    assert main(["generate", "--gamma", "150", "--dims", "2", "--seed", "1", "--format", "csv", "--out", str(out)]) == 0
    assert (tmp_path / "p.csv").exists() and (tmp_path / "p.meta.json").exists()
    side = json.loads((tmp_path / "p.meta.json").read_text())
    pts, head = read_points_csv(tmp_path / "p.csv")
    assert side["points"] == len(pts) and side["seed"] == 1 and side["gamma"] == 150.0
    assert side["acceleration_rate"] == 65536 / side["occupied_cells"]
    assert "wall_time" in json.loads((tmp_path / "p.timing.json").read_text())


@pytest.mark.parametrize("argv", [["generate", "--gamma", "-5"], ["generate", "--bogus"], [],
                                  ["generate", "--nu", "0.5,1"], ["rate"], ["bench", "--reps", "3"]])
def test_usage_errors(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1
    assert "usage" in capsys.readouterr().err


def test_usage_exit_code_from_process():
    proc = subprocess.run([sys.executable, "-m", "pdisc", "generate", "--gamma", "-5"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "usage" in proc.stderr


def test_contract_violation_exit_code(tmp_path, capsys):
    assert main(["generate", "--gamma", "1e7", "--out", str(tmp_path / "x")]) == 2
    assert "GridSizeError" in capsys.readouterr().err
    bad = tmp_path / "bad.csv"
    bad.write_text("# pdisc v1, n=2, seed=1, gamma=3.0, nu=(1,1)\n0.1\n")
    assert main(["analyze", str(bad)]) == 2
    assert main(["generate", "--algo", "bridson", "--out", str(tmp_path / "y")]) == 2


def test_rate_command(tmp_path, capsys):
    out = tmp_path / "r"
    assert main(["rate", "--alpha", "8", "--matrix", "256x256", "--tol", "0.01", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "gamma_min" in text and "target 8" in text
    trace = (tmp_path / "r.trace.csv").read_text().splitlines()
    assert trace[0].startswith("iteration,gamma_min") and len(trace) > 5
    side = json.loads((tmp_path / "r.meta.json").read_text())
    assert abs(side["acceleration_rate"] - 8) / 8 < 0.05 and side["reached"]
    assert read_mask_pbm(tmp_path / "r.pbm").sum() == side["occupied_cells"]


def test_rate_unreachable(tmp_path, capsys):
    assert main(["rate", "--alpha", "8", "--bounds", "r_min", "--out", str(tmp_path / "u")]) == 3
    assert "unreachable" in capsys.readouterr().err
    assert main(["rate", "--alpha", "8", "--bounds", "r_min", "--best-effort", "--out", str(tmp_path / "u")]) == 0


def test_analyze_reproduces_verdict_and_rate(tmp_path, capsys):
    out = tmp_path / "a"
    main(["generate", "--gamma", "80", "--nu", "1,3", "--seed", "4", "--calib", "10x10", "--out", str(out)])
    side = json.loads((tmp_path / "a.meta.json").read_text())
    capsys.readouterr()
    assert main(["analyze", str(tmp_path / "a.csv"), "--voronoi", "--coverage", "--res", "256"]) == 0
    text = capsys.readouterr().out
    assert "valid: True" in text
    assert f"acceleration rate: {side['acceleration_rate']!r}" in text
    assert (tmp_path / "voronoi.csv").exists() and (tmp_path / "coverage.csv").exists()


def test_analyze_json_input(tmp_path, capsys):
    main(["generate", "--gamma", "40", "--format", "json", "--out", str(tmp_path / "j")])
    capsys.readouterr()
    assert main(["analyze", str(tmp_path / "j.json")]) == 0
    assert "valid: True" in capsys.readouterr().out


def test_generate_formats_and_nd(tmp_path):
    assert main(["generate", "--gamma", "40", "--format", "pbm", "--matrix", "64x64", "--out", str(tmp_path / "m")]) == 0
    assert read_mask_pbm(tmp_path / "m.pbm").shape == (64, 64)
    assert main(["generate", "--gamma", "8", "--dims", "3", "--format", "pbm", "--matrix", "16",
                 "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "c.mask.csv").read_text().startswith("# pdisc mask v1, sizes=16x16x16")
    assert main(["generate", "--field", "constant", "--value", "0.05", "--algo", "bridson",
                 "--out", str(tmp_path / "b")]) == 0
    assert main(["generate", "--gamma", "30", "--algo", "dart", "--out", str(tmp_path / "d"),
                 "--plot", str(tmp_path / "d.png")]) == 0
    assert (tmp_path / "d.png").stat().st_size > 0


def test_determinism_byte_identical(tmp_path):
    for fmt in ("csv", "pbm", "json"):
        blobs = []
        for run_dir in ("one", "two"):
            out = tmp_path / run_dir / "p"
            main(["generate", "--gamma", "90", "--nu", "3,1", "--seed", "11", "--format", fmt, "--out", str(out)])
            files = sorted(f for f in (tmp_path / run_dir).iterdir() if not f.name.endswith(".timing.json"))
            blobs.append({f.name: f.read_bytes() for f in files})
        assert blobs[0] == blobs[1]


def test_bench_and_compare_commands(tmp_path, capsys):
    assert main(["bench", "--reps", "5", "--warmups", "2", "--gamma", "30", "--out", str(tmp_path / "b.csv"),
                 "--plot", str(tmp_path / "b.png")]) == 0
    assert "speedup" in capsys.readouterr().out
    assert main(["compare", "--gamma", "25", "--seeds", "2", "--res", "256", "--dart-failures", "300",
                 "--out-dir", str(tmp_path), "--plot", str(tmp_path / "c.png")]) == 0
    text = capsys.readouterr().out
    assert "fast vs tulleken" in text and "fast vs dart" in text
    assert (tmp_path / "similarity_fast_tulleken.csv").exists()
