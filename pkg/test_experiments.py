#!/usr/bin/env python3
"""
Tests for the experiment harness and its CSV/JSON reports.
"""
import json
import os
import sys
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_array_equal

from gds_core.config import DEFAULT_SIZES, DEFAULT_Z_VALUES
from gds_core.errors import DomainError, UnknownExperimentError
from gds_core.models import ExperimentConfig, ExperimentId, ExperimentRow
from gds_core.verify import is_un_member
from gds_stats.experiments import (
    derive_seed, random_matrix, random_orthogonal, random_un_basis,
    run_experiment, check_acceptance,
)
from gds_stats.report import (
    build_report, export_rows_to_csv, export_report_to_json, sidecar_path, format_summary,
)


def _run(experiment, seed=0, workers=1, **grid):
    cfg = ExperimentConfig.default(ExperimentId(experiment), seed=seed)
    if grid:
        cfg = ExperimentConfig(experiment=cfg.experiment, seed=seed, **grid)
    return cfg, run_experiment(cfg, workers=workers)


# ============ Seeded inputs ============

def test_derive_seed_is_deterministic():
    """Test derived seeds depend on every key component."""
    assert derive_seed(0, 1, 0) == derive_seed(0, 1, 0)
    assert derive_seed(0, 1, 0) != derive_seed(0, 1, 1)
    assert derive_seed(0, 1, 0) != derive_seed(1, 1, 0)
    assert 0 <= derive_seed(2 ** 64 - 1, 3) < 2 ** 64


def test_random_matrix_reproducible():
    """Test the same seed gives the same matrix."""
    assert_array_equal(random_matrix(6, 42), random_matrix(6, 42))
    assert not np.array_equal(random_matrix(6, 42), random_matrix(6, 43))
    assert_array_equal(random_matrix(4, 7), np.random.default_rng(7).standard_normal((4, 4)))
    with pytest.raises(DomainError):
        random_matrix(0, 1)


def test_random_matrix_moments():
    """Test 10^6 standard normal entries have mean near 0 and variance near 1."""
    x = random_matrix(1000, 2024)
    assert abs(float(np.mean(x))) <= 0.01
    assert abs(float(np.var(x)) - 1.0) <= 0.02


def test_random_bases():
    """Test random orthogonal and U_n factories."""
    q = random_orthogonal(9, 3)
    assert np.linalg.norm(np.eye(9) - q.T @ q, 2) <= 1e-14
    assert is_un_member(random_un_basis(9, 3), 1e-13)


# ============ Configuration ============

def test_default_grids():
    """Test each experiment gets the grid its table uses."""
    assert ExperimentConfig.default(ExperimentId.TABLE1).z_values == DEFAULT_Z_VALUES
    assert ExperimentConfig.default(ExperimentId.TABLE3).sizes == DEFAULT_SIZES
    example = ExperimentConfig.default(ExperimentId.EXAMPLE4, seed=9)
    assert example.sizes == () and example.z_values == () and example.seed == 9


def test_config_validation():
    """Test empty grids, small sizes and bad seeds."""
    with pytest.raises(DomainError):
        ExperimentConfig(ExperimentId.TABLE3, sizes=()).validate()
    with pytest.raises(DomainError):
        ExperimentConfig(ExperimentId.TABLE1, z_values=()).validate()
    with pytest.raises(DomainError):
        ExperimentConfig(ExperimentId.TABLE4, sizes=(1, 5)).validate()
    with pytest.raises(DomainError):
        ExperimentConfig(ExperimentId.EXAMPLE5, seed=-1).validate()
    with pytest.raises(DomainError):
        ExperimentConfig(ExperimentId.EXAMPLE5, seed=2 ** 64).validate()


def test_unknown_experiment_lists_valid_ids():
    """Test the error names every valid id."""
    with pytest.raises(UnknownExperimentError) as exc:
        ExperimentId.parse("table9")
    for experiment in ExperimentId:
        assert experiment.value in str(exc.value)


# ============ Table reproduction ============

def test_table1_stable_formula():
    """Test all three errors stay below 1e-14 for every z."""
    cfg, rows = _run("table1")
    assert [row.param for row in rows] == list(DEFAULT_Z_VALUES)
    assert check_acceptance(cfg.experiment, rows)
    for row in rows:
        assert max(row.err_orth, row.err_rows, row.err_columns) <= 1e-14
    assert rows[-1].err_orth <= 1e-15


def test_table2_unstable_formula():
    """Test the error band at z = 1e-14 and growth as z shrinks."""
    cfg, rows = _run("table2")
    by_z = {row.param: row.err_orth for row in rows}
    assert 1e-6 <= by_z[1e-14] <= 1e-1
    assert by_z[1e-14] > by_z[1e-6] > by_z[1e-3]
    assert by_z[1e-14] >= 1e6 * by_z[1e-3]
    assert check_acceptance(cfg.experiment, rows)


def test_table3_full_grid():
    """Test err_orth <= 1e-13 for n up to 1000."""
    cfg, rows = _run("table3")
    assert [row.param for row in rows] == [10, 50, 100, 500, 1000]
    assert all(row.err_rows is None and row.err_columns is None for row in rows)
    assert all(row.err_orth <= 1e-13 for row in rows)
    assert check_acceptance(cfg.experiment, rows)


def test_table4_full_grid():
    """Test all three errors <= 1e-12 for n up to 1000."""
    cfg, rows = _run("table4")
    assert [row.param for row in rows] == list(DEFAULT_SIZES)
    for row in rows:
        assert row.err_orth <= 1e-13
        assert row.err_rows <= 1e-12 and row.err_columns <= 1e-12
    assert check_acceptance(cfg.experiment, rows)


def test_example4_and_example5():
    """Test the single-row examples meet their bounds."""
    cfg, rows = _run("example4")
    assert len(rows) == 1 and rows[0].param == 9
    assert rows[0].residual <= 1e-13
    assert max(rows[0].err_orth, rows[0].err_rows, rows[0].err_columns) <= 1e-13
    assert check_acceptance(cfg.experiment, rows)

    cfg, rows = _run("example5")
    assert len(rows) == 1 and rows[0].param == 4
    assert rows[0].residual <= 1e-12
    assert max(rows[0].err_orth, rows[0].err_rows, rows[0].err_columns) <= 1e-13
    assert check_acceptance(cfg.experiment, rows)


def test_parallel_rows_match_serial():
    """Test a thread pool gives bit-identical rows."""
    grid = dict(sizes=(5, 12, 30, 7))
    _, serial = _run("table4", seed=11, workers=1, **grid)
    _, parallel = _run("table4", seed=11, workers=4, **grid)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]


# ============ Acceptance ============

def test_acceptance_flags_offending_row():
    """Test a row over its bound fails the experiment and only that row."""
    rows = [ExperimentRow(param=10, err_orth=1e-15), ExperimentRow(param=50, err_orth=1e-9)]
    assert not check_acceptance(ExperimentId.TABLE3, rows)
    assert rows[0].passed and not rows[1].passed


def test_acceptance_rejects_non_finite():
    """Test NaN statistics never pass."""
    rows = [ExperimentRow(param=1e-3, err_orth=float('nan'), err_rows=0.0, err_columns=0.0)]
    assert not check_acceptance(ExperimentId.TABLE1, rows)


def test_acceptance_table2_needs_growth():
    """Test flat unstable errors fail the trend check."""
    rows = [ExperimentRow(param=z, err_orth=1e-3, err_rows=0.0, err_columns=0.0)
            for z in (1e-3, 1e-6, 1e-14)]
    assert not check_acceptance(ExperimentId.TABLE2, rows)


def test_acceptance_empty_rows():
    """Test an empty table never passes."""
    assert not check_acceptance(ExperimentId.TABLE1, [])


# ============ Reports ============

def test_csv_export_layout(tmp_path):
    """Test header, blank cells for unmeasured statistics and full precision."""
    cfg, rows = _run("table3", sizes=(4, 6))
    path = tmp_path / "out" / "table3.csv"
    export_rows_to_csv(rows, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "param,err_orth,err_rows,err_columns"
    assert lines[1].startswith("4,") and lines[1].endswith(",,")
    df = pd.read_csv(path, float_precision="round_trip")
    assert df['err_orth'].tolist() == [row.err_orth for row in rows]
    assert df['err_rows'].isna().all()


def test_json_sidecar(tmp_path):
    """Test the sidecar echoes config, rows and verdict."""
    cfg, rows = _run("example5", seed=3)
    passed = check_acceptance(cfg.experiment, rows)
    csv_path = str(tmp_path / "example5.csv")
    assert sidecar_path(csv_path) == str(tmp_path / "example5.json")
    export_report_to_json(build_report(cfg, rows, passed), sidecar_path(csv_path))
    with open(sidecar_path(csv_path)) as f:
        payload = json.load(f)
    assert payload['config'] == {'experiment': 'example5', 'seed': 3, 'sizes': [], 'z_values': []}
    assert payload['passed'] is True
    assert payload['rows'][0]['param'] == 4
    assert payload['rows'][0]['residual'] == rows[0].residual


def test_reports_are_reproducible(tmp_path):
    """Test two runs with one seed write byte-identical files."""
    outputs = []
    for k in range(2):
        cfg, rows = _run("table4", seed=5, sizes=(6, 9))
        path = tmp_path / f"run{k}.csv"
        export_rows_to_csv(rows, str(path))
        export_report_to_json(build_report(cfg, rows, check_acceptance(cfg.experiment, rows)),
                              sidecar_path(str(path)))
        outputs.append((path.read_bytes(), (tmp_path / f"run{k}.json").read_bytes()))
    assert outputs[0] == outputs[1]


def test_format_summary():
    """Test the console summary names the experiment and verdict."""
    cfg, rows = _run("table1")
    text = format_summary(cfg, rows, True)
    assert "EXPERIMENT table1" in text
    assert "passed" in text
