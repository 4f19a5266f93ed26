#!/usr/bin/env python3
"""
Reproduce All Experiments
Runs every accuracy table and example, writes CSV + JSON sidecars into
GDS_RESULTS_DIR and prints a summary per experiment.
"""
import argparse
import logging
import os
import sys
from dotenv import load_dotenv

load_dotenv()

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from gds_core.config import Config
from gds_core.errors import GdsError
from gds_core.models import ExperimentConfig, ExperimentId
from gds_stats.experiments import run_experiment, check_acceptance
from gds_stats.report import (
    build_report, export_rows_to_csv, export_report_to_json, sidecar_path, format_summary,
)

logger = logging.getLogger(__name__)


def reproduce(experiment: ExperimentId, seed: int, results_dir: str, workers: int) -> bool:
    """Run one experiment and export it.

    Args:
        experiment: Experiment to run
        seed: Master seed
        results_dir: Output directory
        workers: Thread count

    Returns:
        True if every row met its bound
    """
    cfg = ExperimentConfig.default(experiment, seed=seed)
    rows = run_experiment(cfg, workers=workers)
    passed = check_acceptance(experiment, rows)

    csv_path = os.path.join(results_dir, f"{experiment.value}.csv")
    export_rows_to_csv(rows, csv_path)
    export_report_to_json(build_report(cfg, rows, passed), sidecar_path(csv_path))

    print(format_summary(cfg, rows, passed))
    print(f"  → {csv_path}")
    return passed


def main():
    parser = argparse.ArgumentParser(description='Reproduce every accuracy table')
    parser.add_argument('--seed', type=int, default=None, help='Master seed (env GDS_DEFAULT_SEED)')
    parser.add_argument('--results-dir', default=Config.RESULTS_DIR, help='Output directory')
    parser.add_argument('--workers', type=int, default=Config.WORKERS, help='Thread count')
    parser.add_argument('--only', nargs='*', default=None, help='Subset of experiment ids')
    args = parser.parse_args()

    logging.basicConfig(
        level=getattr(logging, Config.LOG_LEVEL, logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s'
    )

    invalid = Config.validate()
    if invalid:
        print(f"✗ Configuration error: malformed {', '.join(invalid)}")
        return 2

    try:
        seed = Config.default_seed() if args.seed is None else args.seed
        experiments = [ExperimentId.parse(x) for x in args.only] if args.only else list(ExperimentId)
    except (GdsError, ValueError) as e:
        print(f"✗ {e}")
        return 2

    failed = []
    for experiment in experiments:
        try:
            if not reproduce(experiment, seed, args.results_dir, args.workers):
                failed.append(experiment.value)
        except GdsError as e:
            logger.error(f"❌ {experiment.value}: {e}")
            failed.append(experiment.value)

    print("\n" + "=" * 70)
    if failed:
        print(f"✗ Failed: {', '.join(failed)}")
        print("=" * 70)
        return 1
    print(f"✓ All {len(experiments)} experiments within bounds")
    print("=" * 70)
    return 0


if __name__ == "__main__":
    sys.exit(main())
