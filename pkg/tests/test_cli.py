import csv

import pytest

from gwfradar.cli import main
from gwfradar.harness import dump_config, load_config


@pytest.fixture
def cfg_path(tmp_path):
    c = load_config("active").replace(points_per_side=5, scene_side=12.0, receivers=6, freq_samples=16, iterations=40)
    p = tmp_path / "tiny.cfg"
    p.write_text(dump_config(c))
    return p


def test_simulate_then_reconstruct(tmp_path, cfg_path):
    out = tmp_path / "run"
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
    assert (out / "data.csv").exists() and (out / "truth.pgm").exists()
    assert main(["reconstruct", "--config", str(cfg_path), "--out", str(out), "--data", str(out / "data.csv"), "--trace"]) == 0
    rows = list(csv.DictReader(open(out / "trace.csv")))
    assert list(rows[0]) == ["iteration", "objective", "aligned_mse"]
    assert len(rows) == 41
    assert (out / "estimate.pgm").exists() and (out / "summary.csv").exists()


def test_reconstruct_deterministic(tmp_path, cfg_path):
    for name in ("a", "b"):
        assert main(["reconstruct", "--config", str(cfg_path), "--out", str(tmp_path / name), "--trace"]) == 0
    for f in ("trace.csv", "summary.csv", "estimate.pgm", "estimate.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_sweep(tmp_path, cfg_path):
    rc = main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path), "--sweep", "receivers",
               "--values", "4,6", "--seeds", "0,1"])
    assert rc == 0
    rows = list(csv.DictReader(open(tmp_path / "sweep_receivers.csv")))
    assert [(r["value"], r["seed"]) for r in rows] == [("4", "0"), ("4", "1"), ("6", "0"), ("6", "1")]


def test_sweep_missing_axis(tmp_path, cfg_path):
    assert main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path)]) == 1
    assert main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path), "--sweep", "snr", "--values", "a,b"]) == 1


def test_bounds(tmp_path, capsys):
    assert main(["bounds", "--config", "active", "--out", str(tmp_path)]) == 0
    rows = dict(csv.reader(open(tmp_path / "bounds.csv")))
    assert float(rows["resolution_bound_m"]) == pytest.approx(1.939, abs=1e-3)
    assert "M >= 5.8 L/dres" in capsys.readouterr().out


def test_validate(tmp_path):
    assert main(["validate", "--out", str(tmp_path), "--instances", "2"]) == 0
    rows = list(csv.DictReader(open(tmp_path / "validate.csv")))
    assert rows and all(r["passed"] == "True" for r in rows)


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("receivers = 1\n")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert main(["simulate", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path)]) == 1


def test_numerical_failure_exit_code(tmp_path, cfg_path):
    c = load_config(cfg_path).replace(step_size=500.0, warmup=0.0)
    p = tmp_path / "wild.cfg"
    p.write_text(dump_config(c))
    assert main(["reconstruct", "--config", str(p), "--out", str(tmp_path), "--trace"]) == 2
    assert (tmp_path / "trace.csv").exists()


def test_data_shape_mismatch(tmp_path, cfg_path):
    out = tmp_path / "run"
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
    other = load_config(cfg_path).replace(receivers=8)
    p = tmp_path / "other.cfg"
    p.write_text(dump_config(other))
    assert main(["reconstruct", "--config", str(p), "--out", str(out), "--data", str(out / "data.csv")]) == 1
