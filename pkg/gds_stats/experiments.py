"""
Experiment harness - seeded random inputs and reproduction of the accuracy tables.

Every row derives its own generator seed from (seed, row index), so running
rows on a thread pool gives exactly the same numbers as running them in order.
"""
import logging
import concurrent.futures
from typing import Callable, Dict, List, Optional

import numpy as np

from gds_core.config import Config
from gds_core.construct import (
    build_gds3_stable, build_gds3_unstable, extend_to_un_basis,
    build_gds_from_block, build_eig_gds, build_ybe_seed, build_ybe_gds,
)
from gds_core.dense import frozen, qr_householder
from gds_core.errors import DomainError
from gds_core.models import (
    EigSpec, YbeSeedSpec, ExperimentConfig, ExperimentId, ExperimentRow,
)
from gds_core.verify import gds_report, verify_eigenpairs, ybe_residual

logger = logging.getLogger(__name__)

# Inputs of the two single-row examples
EXAMPLE4_SPEC = EigSpec(r=2, p=3, pairs=(0.6 + 0.8j, -0.8 + 0.6j))
EXAMPLE5_SPEC = YbeSeedSpec(n=2, d=(1.0, -1.0, 1.0, 1.0))


# ============ Random inputs ============

def derive_seed(seed: int, *key: int) -> int:
    """64-bit seed derived from ``seed`` and an integer key path (row index, stream)."""
    ss = np.random.SeedSequence([seed, *key])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def random_matrix(n: int, seed: int) -> np.ndarray:
    """
    n x n matrix of standard normal entries.

    Uses numpy's PCG64 generator and its ziggurat normal sampler; the same
    (n, seed) always yields the same matrix.

    Raises:
        DomainError: If n < 1
    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    return frozen(rng.standard_normal((n, n)))


def random_orthogonal(n: int, seed: int) -> np.ndarray:
    """Orthogonal factor of the Householder QR of random_matrix(n, seed)."""
    return qr_householder(random_matrix(n, seed)).q


def random_un_basis(n: int, seed: int) -> np.ndarray:
    """Member of U_n completed from random_matrix(n, seed)."""
    return extend_to_un_basis(random_matrix(n, seed))


# ============ Row builders ============

def _gds3_row(z: float, builder: Callable[[float], np.ndarray]) -> ExperimentRow:
    report = gds_report(builder(z))
    return ExperimentRow(param=z, err_orth=report.err_orth,
                         err_rows=report.err_rows, err_columns=report.err_columns)


def _table3_row(n: int, seed: int) -> ExperimentRow:
    q = random_un_basis(n, seed)
    return ExperimentRow(param=n, err_orth=gds_report(q).err_orth)


def _table4_row(n: int, seed: int, block_seed: int) -> ExperimentRow:
    q = random_un_basis(n, seed)
    w = random_orthogonal(n - 1, block_seed)
    report = gds_report(build_gds_from_block(q, w))
    return ExperimentRow(param=n, err_orth=report.err_orth,
                         err_rows=report.err_rows, err_columns=report.err_columns)


def _example4_row(seed: int) -> ExperimentRow:
    q = random_un_basis(EXAMPLE4_SPEC.n, seed)
    a = build_eig_gds(EXAMPLE4_SPEC, q)
    report = gds_report(a)
    return ExperimentRow(param=EXAMPLE4_SPEC.n, err_orth=report.err_orth,
                         err_rows=report.err_rows, err_columns=report.err_columns,
                         residual=verify_eigenpairs(a, EXAMPLE4_SPEC, q))


def _example5_row(seed: int) -> ExperimentRow:
    b = build_ybe_seed(EXAMPLE5_SPEC)
    p = random_un_basis(EXAMPLE5_SPEC.n, seed)
    a = build_ybe_gds(b, p)
    report = gds_report(a)
    return ExperimentRow(param=a.shape[0], err_orth=report.err_orth,
                         err_rows=report.err_rows, err_columns=report.err_columns,
                         residual=ybe_residual(a))


def _row_tasks(cfg: ExperimentConfig) -> List[Callable[[], ExperimentRow]]:
    exp = cfg.experiment
    if exp is ExperimentId.TABLE1:
        return [lambda z=z: _gds3_row(z, build_gds3_stable) for z in cfg.z_values]
    if exp is ExperimentId.TABLE2:
        return [lambda z=z: _gds3_row(z, build_gds3_unstable) for z in cfg.z_values]
    if exp is ExperimentId.TABLE3:
        return [lambda n=n, i=i: _table3_row(n, derive_seed(cfg.seed, i, 0))
                for i, n in enumerate(cfg.sizes)]
    if exp is ExperimentId.TABLE4:
        return [lambda n=n, i=i: _table4_row(n, derive_seed(cfg.seed, i, 0), derive_seed(cfg.seed, i, 1))
                for i, n in enumerate(cfg.sizes)]
    if exp is ExperimentId.EXAMPLE4:
        return [lambda: _example4_row(derive_seed(cfg.seed, 0, 0))]
    if exp is ExperimentId.EXAMPLE5:
        return [lambda: _example5_row(derive_seed(cfg.seed, 0, 0))]
    raise DomainError(f"no row builder for {exp}")


# ============ Acceptance ============

# Per-row upper bounds: (err_orth, err_rows, err_columns, residual); None = unchecked
ROW_BOUNDS: Dict[ExperimentId, tuple] = {
    ExperimentId.TABLE1: (1e-14, 1e-14, 1e-14, None),
    ExperimentId.TABLE2: (None, None, None, None),
    ExperimentId.TABLE3: (1e-13, None, None, None),
    ExperimentId.TABLE4: (1e-13, 1e-12, 1e-12, None),
    ExperimentId.EXAMPLE4: (1e-13, 1e-13, 1e-13, 1e-13),
    ExperimentId.EXAMPLE5: (1e-13, 1e-13, 1e-13, 1e-12),
}

# Cancellation band for the unstable 3x3 formula at its smallest z
UNSTABLE_BAND = (1e-6, 1e-1)
UNSTABLE_BAND_Z = 1e-14


def _row_within(row: ExperimentRow, bounds: tuple) -> bool:
    values = (row.err_orth, row.err_rows, row.err_columns, row.residual)
    for value, bound in zip(values, bounds):
        if value is None:
            continue
        if not np.isfinite(value) or value < 0:
            return False
        if bound is not None and value > bound:
            return False
    return True


def _unstable_trend_ok(rows: List[ExperimentRow]) -> bool:
    by_z = {row.param: row.err_orth for row in rows}
    ok = True
    if UNSTABLE_BAND_Z in by_z:
        lo, hi = UNSTABLE_BAND
        ok &= lo <= by_z[UNSTABLE_BAND_Z] <= hi
    if all(z in by_z for z in (1e-3, 1e-6, 1e-14)):
        # cancellation worsens as z shrinks
        ok &= by_z[1e-14] > by_z[1e-6] > by_z[1e-3]
        ok &= by_z[1e-14] >= 1e6 * by_z[1e-3]
    return bool(ok)


def check_acceptance(experiment: ExperimentId, rows: List[ExperimentRow]) -> bool:
    """
    Mark each row's ``passed`` flag and return whether the experiment as a whole passes.
    """
    bounds = ROW_BOUNDS[experiment]
    for row in rows:
        row.passed = _row_within(row, bounds)
    passed = bool(rows) and all(row.passed for row in rows)
    if experiment is ExperimentId.TABLE2:
        trend = _unstable_trend_ok(rows)
        if not trend:
            logger.warning("unstable 3x3 errors do not show the expected cancellation growth")
        passed = passed and trend
    return passed


# ============ Runner ============

def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None) -> List[ExperimentRow]:
    """
    Run every row of an experiment, in the parameter order of the configuration.

    Args:
        cfg: Experiment configuration
        workers: Thread count (default Config.WORKERS); results do not depend on it

    Returns:
        List of rows, ``passed`` flags already set by check_acceptance
    """
    cfg.validate()
    workers = Config.WORKERS if workers is None else workers
    tasks = _row_tasks(cfg)
    logger.info(f"Running {cfg.experiment.value}: {len(tasks)} row(s), seed={cfg.seed}, workers={workers}")

    if workers > 1 and len(tasks) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(task) for task in tasks]
            rows = [future.result() for future in futures]
    else:
        rows = [task() for task in tasks]

    passed = check_acceptance(cfg.experiment, rows)
    for row in rows:
        logger.info(
            f"{cfg.experiment.value} param={row.param}: err_orth={row.err_orth:.3e}"
            + (f", err_rows={row.err_rows:.3e}, err_columns={row.err_columns:.3e}" if row.err_rows is not None else "")
            + (f", residual={row.residual:.3e}" if row.residual is not None else "")
        )
    logger.info(f"{cfg.experiment.value} {'passed' if passed else 'FAILED'} acceptance bounds")
    return rows
