"""
Experiment Report - CSV/JSON export and console summaries for experiment runs.
"""
import json
import os
from typing import List, Dict, Any

import pandas as pd

from gds_core.models import ExperimentConfig, ExperimentRow

CSV_COLUMNS = ['param', 'err_orth', 'err_rows', 'err_columns']
FLOAT_FORMAT = '%.16e'


def build_report(cfg: ExperimentConfig, rows: List[ExperimentRow], passed: bool) -> Dict[str, Any]:
    """
    Assemble the JSON sidecar: configuration echo, every row and the verdict.

    No timestamps are recorded so identical runs produce identical files.
    """
    return {
        'config': cfg.to_dict(),
        'passed': passed,
        'rows': [row.to_dict() for row in rows],
    }


def export_rows_to_csv(rows: List[ExperimentRow], filepath: str):
    """Write rows as ``param,err_orth,err_rows,err_columns``; unmeasured cells stay blank."""
    df = pd.DataFrame([row.to_dict() for row in rows], columns=CSV_COLUMNS)
    for col in CSV_COLUMNS[1:]:
        df[col] = df[col].astype(float)
    _ensure_parent(filepath)
    df.to_csv(filepath, index=False, float_format=FLOAT_FORMAT, na_rep='', lineterminator='\n')


def export_report_to_json(report: Dict[str, Any], filepath: str):
    """Export report to JSON file."""
    _ensure_parent(filepath)
    with open(filepath, 'w') as f:
        json.dump(report, f, indent=2)
        f.write('\n')


def sidecar_path(csv_path: str) -> str:
    """JSON sidecar next to a CSV report: results/table3.csv -> results/table3.json."""
    root, _ = os.path.splitext(csv_path)
    return root + '.json'


def format_summary(cfg: ExperimentConfig, rows: List[ExperimentRow], passed: bool) -> str:
    """Human-readable table of one experiment."""
    df = pd.DataFrame([row.to_dict() for row in rows])
    lines = [
        "=" * 70,
        f"EXPERIMENT {cfg.experiment.value}  (seed={cfg.seed})",
        "=" * 70,
        df.to_string(index=False, float_format=lambda v: f"{v:.2e}", na_rep='-'),
        f"\n{'✓ passed' if passed else '✗ FAILED'} acceptance bounds",
    ]
    return "\n".join(lines)


def _ensure_parent(filepath: str):
    directory = os.path.dirname(filepath)
    if directory:
        os.makedirs(directory, exist_ok=True)
