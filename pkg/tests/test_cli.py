import csv
import os

import numpy as np
import pytest

from geocorr import cache
from geocorr.cli import RunConfig, main


def run(args):
    return main(args)


def test_run_config_invariants():
    with pytest.raises(ValueError):
        RunConfig(command="enumerate", Q=1)
    with pytest.raises(ValueError):
        RunConfig(command="enumerate", grid_step=0.0)
    with pytest.raises(ValueError):
        RunConfig(command="enumerate", mc_samples=100)


def test_usage_errors_exit_two(capsys):
    assert run(["enumerate", "--q", "1"]) == 2
    assert run(["empirical", "--xi-max", "-1"]) == 2
    assert run(["compare", "--convention", "tan"]) == 2


def test_enumerate_writes_csv(tmp_path, capsys):
    out = tmp_path / "ball.csv"
    assert run(["enumerate", "--q", "10", "--out", str(out)]) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["p_prime", "p", "q_prime", "q", "norm_sq",
                       "phi", "psi", "theta"]
    assert len(rows) > 10
    printed = capsys.readouterr().out
    assert f"B_Q = {len(rows) - 1}" in printed


def test_empirical_curve(tmp_path):
    out = tmp_path / "emp.csv"
    code = run(["empirical", "--q", "40", "--xi-max", "0.4",
                "--grid-step", "0.2", "--out", str(out),
                "--cache-dir", str(tmp_path / "cache")])
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["xi", "R"]
    assert len(rows) == 4  # grid 0, 0.2, 0.4
    vals = [float(r[1]) for r in rows[1:]]
    assert vals == sorted(vals)


def test_empirical_cache_roundtrip(tmp_path):
    cache_dir = tmp_path / "cache"
    out = tmp_path / "e.csv"
    args = ["empirical", "--q", "30", "--out", str(out),
            "--cache-dir", str(cache_dir)]
    assert run(args) == 0
    first = open(out).read()
    key = cache.config_key("samples", Q=30, convention="ANGLE")
    assert os.path.exists(cache.cache_path(str(cache_dir), key))
    assert run(args) == 0
    assert open(out).read() == first


def test_cache_rejects_corruption(tmp_path):
    cache.save_arrays(str(tmp_path), "k", {"a": np.arange(3)})
    assert cache.load_arrays(str(tmp_path), "k")["a"].tolist() == [0, 1, 2]
    path = cache.cache_path(str(tmp_path), "k")
    with open(path, "r+b") as fh:
        fh.write(b"XXXX")
    assert cache.load_arrays(str(tmp_path), "k") is None
    assert cache.load_arrays(str(tmp_path), "missing") is None


def test_theoretical_writes_density_and_cumulative(tmp_path):
    out = tmp_path / "theo.csv"
    code = run(["theoretical", "--xi-max", "0.2", "--grid-step", "0.1",
                "--cutoff-norm-sq", "500", "--out", str(out)])
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "g2"]
    assert float(rows[1][1]) == pytest.approx(0.7, abs=0.02)
    cum = tmp_path / "theo_R.csv"
    with open(cum, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["xi", "R"]
    assert float(rows[1][1]) == 0.0


def test_theoretical_grid_beyond_range_needs_flag(tmp_path):
    out = tmp_path / "theo.csv"
    args = ["theoretical", "--xi-max", "1.0", "--grid-step", "0.5",
            "--cutoff-norm-sq", "500", "--out", str(out)]
    # x = 1.0 -> xi = 4pi/3 > 4: refused without the flag
    assert run(args) == 2
    assert run(args + ["--allow-extrapolation", "--mc-samples",
                       "10000"]) == 0


def test_geodesics_summary(tmp_path, capsys):
    out = tmp_path / "geo.csv"
    code = run(["geodesics", "--cutoff-norm-sq", "2000",
                "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "g2(0) semigroup" in printed
    assert "g2(0) arithmetic" in printed
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["word", "trace", "length", "primitive", "d",
                       "nu", "alpha_d"]


def test_compare_smoke(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    code = run(["compare", "--q", "120", "--xi-max", "0.5",
                "--bins", "0.25", "--cutoff-norm-sq", "2000",
                "--mc-samples", "10000", "--tolerance", "1.0",
                "--cache-dir", str(tmp_path / "cache"),
                "--out", str(out)])
    assert code == 0
    assert os.path.exists(tmp_path / "cmp.png")
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "g2_empirical", "g2_theoretical", "diff"]
    printed = capsys.readouterr().out
    assert "sup |empirical - theoretical|" in printed


def test_compare_tolerance_failure_exits_one(tmp_path):
    out = tmp_path / "cmp.csv"
    code = run(["compare", "--q", "120", "--xi-max", "0.5",
                "--bins", "0.25", "--cutoff-norm-sq", "2000",
                "--mc-samples", "10000", "--tolerance", "0.0000001",
                "--cache-dir", str(tmp_path / "cache"),
                "--out", str(out)])
    assert code == 1
