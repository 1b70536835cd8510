import csv
import subprocess
import sys

import numpy as np
import pytest

from swarmretreat import InvalidInputError, harness


def test_default_spec_kinds_cover_every_analysis():
    for kind in ("encounter-fit", "task-fit", "estimator-bias", "closed-loop",
                 "throughput-curve", "optimal-density", "full-sim"):
        spec = harness.default_spec(kind)
        assert spec.analyses


def test_default_spec_rejects_unknown_kind():
    with pytest.raises(InvalidInputError):
        harness.default_spec("nope")


def test_config_round_trip(tmp_path):
    spec = harness.default_spec("closed-loop", replicas=3)
    path = tmp_path / "cfg.yaml"
    harness.save_config(spec, str(path))
    loaded = harness.load_config(str(path))
    assert loaded.name == spec.name
    assert loaded.replicas == 3
    assert loaded.analyses == spec.analyses
    assert loaded.sim == spec.sim
    assert loaded.cost_c == spec.cost_c


def test_missing_config_field_error_names_the_key(tmp_path):
    spec = harness.default_spec("encounter-fit")
    raw = harness.spec_to_mapping(spec)
    del raw["delta"]
    with pytest.raises(InvalidInputError, match="delta"):
        harness.spec_from_mapping(raw)


def test_replica_seeds_are_base_plus_index():
    spec = harness.default_spec("estimator-bias", replicas=4)
    cfgs = harness._replica_configs(spec)
    assert [c.seed for c in cfgs] == [spec.sim.seed + i for i in range(4)]


def test_report_lines_have_the_five_column_schema():
    rep = harness.AnalysisReport("demo")
    rep.add("metric_a", 1.5, "<2", True)
    line = next(iter(rep.lines()))
    parts = line.split(",")
    assert parts == ["demo", "metric_a", "1.5", "<2", "true"]


def test_histogram_csv_has_theory_overlay(tmp_path):
    rng = np.random.default_rng(1)
    samples = rng.exponential(1.0, 500)
    path = tmp_path / "hist.csv"
    harness.write_histogram_csv(samples, 1.0, str(path))
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0]) == {"bin_left", "bin_right", "count", "theory_density"}
    assert sum(int(r["count"]) for r in rows) == 500
    # the overlay should be the exponential pdf at the bin center
    mid = (float(rows[0]["bin_left"]) + float(rows[0]["bin_right"])) / 2.0
    assert float(rows[0]["theory_density"]) == pytest.approx(np.exp(-mid), abs=1e-4)


def test_report_file_written(tmp_path):
    spec = harness.default_spec("optimal-density", outputs=str(tmp_path))
    reports = harness.run_experiment(spec)
    assert all(r.passed for r in reports)
    with open(tmp_path / "report.csv") as fh:
        header = fh.readline().strip()
    assert header == "analysis,metric,value,tolerance,pass"


def test_cli_optimal_density_exits_zero(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "swarmretreat.cli", "optimal-density",
         "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "optimal-density" in proc.stdout


def test_cli_rejects_unknown_subcommand():
    proc = subprocess.run(
        [sys.executable, "-m", "swarmretreat.cli", "frobnicate"],
        capture_output=True, text=True,
    )
    assert proc.returncode != 0
