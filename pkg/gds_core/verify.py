"""
Error statistics and residual certificates for constructed matrices.
"""
import logging
import math
from typing import List, Tuple

import numpy as np

from gds_core.config import YBE_MAX_BASE
from gds_core.dense import (
    as_matrix, frozen, require_square, spectral_norm, frobenius_norm,
    qr_householder, orthogonality_within,
)
from gds_core.errors import DimensionError, DomainError
from gds_core.models import EigSpec, GdsReport

logger = logging.getLogger(__name__)


def gds_report(a) -> GdsReport:
    """
    Orthogonality and row/column-sum errors of a square matrix.

    err_orth = ||I - A'A||_2, err_rows = ||A e - e||_2, err_columns = ||A' e - e||_2.
    Small values mean A is close to an exactly orthogonal matrix and to a matrix
    with unit row and column sums.

    Raises:
        DimensionError: If a is not square
    """
    a = as_matrix(a, "a")
    n = require_square(a, "a")
    e = np.ones(n)
    err_orth = spectral_norm(np.eye(n) - a.T @ a)
    err_rows = float(np.linalg.norm(a @ e - e))
    err_columns = float(np.linalg.norm(a.T @ e - e))
    return GdsReport(err_orth=err_orth, err_rows=err_rows, err_columns=err_columns, n=n)


def is_gds(a, tol: float) -> bool:
    """True iff both row-sum and column-sum errors are within tol."""
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    a = as_matrix(a, "a")
    n = require_square(a, "a")
    e = np.ones(n)
    return bool(np.linalg.norm(a @ e - e) <= tol and np.linalg.norm(a.T @ e - e) <= tol)


def is_orthogonal(a, tol: float) -> bool:
    """True iff ||I - A'A||_2 <= tol."""
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    return orthogonality_within(a, tol)


def is_un_member(q, tol: float) -> bool:
    """True iff q is orthogonal and its first column is e/sqrt(n), both within tol."""
    q = as_matrix(q, "q")
    n = require_square(q, "q")
    if not is_orthogonal(q, tol):
        return False
    return float(np.linalg.norm(q[:, 0] - 1.0 / math.sqrt(n))) <= tol


def ybe_residual(a) -> float:
    """
    Frobenius norm of (A x I)(I x A)(A x I) - (I x A)(A x I)(I x A), x = Kronecker product.

    Evaluated by direct expansion into n^3 x n^3 products, so meant for small n.

    Raises:
        DimensionError: If the order of a is not a perfect square, or n > YBE_MAX_BASE
    """
    a = as_matrix(a, "a")
    size = require_square(a, "a")
    n = math.isqrt(size)
    if n * n != size:
        raise DimensionError(f"order {size} is not a perfect square n^2")
    if n > YBE_MAX_BASE:
        raise DimensionError(f"base dimension n = {n} exceeds {YBE_MAX_BASE} for the direct n^3 x n^3 residual")
    eye = np.eye(n)
    left = np.kron(a, eye)
    right = np.kron(eye, a)
    lhs = left @ right @ left
    rhs = right @ left @ right
    return frobenius_norm(lhs - rhs)


def _check_eig_shapes(a: np.ndarray, spec: EigSpec, q: np.ndarray) -> int:
    n = require_square(a, "a")
    if q.shape != (n, n) or spec.n != n:
        raise DimensionError(
            f"a is {n}x{n}, q is {q.shape[0]}x{q.shape[1]}, spectrum describes order {spec.n}"
        )
    return n


def verify_eigenpairs(a, spec: EigSpec, q) -> float:
    """
    Largest eigenpair residual of ``a`` against the spectrum laid out in ``q``.

    Columns 0..r-1 of q must be eigenvectors for +1, the next p for -1, then
    each pair k occupies two columns (i, j) and v = q_i - i q_j must satisfy
    A v = (c_k - i s_k) v. No eigensolver is involved.

    Returns:
        max residual norm over all checks (0.0 when there is nothing to check)
    """
    a = as_matrix(a, "a")
    q = as_matrix(q, "q")
    _check_eig_shapes(a, spec, q)

    worst = 0.0
    aq = a @ q
    for i in range(spec.r):
        worst = max(worst, float(np.linalg.norm(aq[:, i] - q[:, i])))
    for i in range(spec.r, spec.r + spec.p):
        worst = max(worst, float(np.linalg.norm(aq[:, i] + q[:, i])))

    base = spec.r + spec.p
    for k, z in enumerate(spec.pairs):
        i, j = base + 2 * k, base + 2 * k + 1
        v = q[:, i] - 1j * q[:, j]
        lam = complex(z.real, -z.imag)
        residual = float(np.linalg.norm(a @ v - lam * v))
        worst = max(worst, residual)

    logger.debug(f"eigenpair residual {worst:.3e} for r={spec.r}, p={spec.p}, m={spec.m}")
    return worst


def block_residuals(a, spec: EigSpec, q) -> List[float]:
    """Per rotation block k: ||A [q_i q_j] - [q_i q_j] R_k||_F."""
    a = as_matrix(a, "a")
    q = as_matrix(q, "q")
    _check_eig_shapes(a, spec, q)
    base = spec.r + spec.p
    out = []
    for k, z in enumerate(spec.pairs):
        cols = q[:, base + 2 * k: base + 2 * k + 2]
        rot = np.array([[z.real, z.imag], [-z.imag, z.real]])
        out.append(frobenius_norm(a @ cols - cols @ rot))
    return out


def spectrum_error(a, spec: EigSpec) -> float:
    """
    Distance between numpy's computed eigenvalues of ``a`` and the prescribed spectrum.

    Each prescribed value is matched to the nearest unused computed one. Reporting
    aid only; verify_eigenpairs is the certificate.
    """
    a = as_matrix(a, "a")
    n = require_square(a, "a")
    if n != spec.n:
        raise DimensionError(f"a is {n}x{n} but the spectrum describes order {spec.n}")
    computed = list(np.linalg.eigvals(a))
    expected = [1.0 + 0j] * spec.r + [-1.0 + 0j] * spec.p
    for z in spec.pairs:
        expected.extend([complex(z), complex(z).conjugate()])
    worst = 0.0
    for target in expected:
        k = min(range(len(computed)), key=lambda idx: abs(computed[idx] - target))
        worst = max(worst, abs(computed.pop(k) - target))
    return worst


def sum_correction(a, axis: str = "rows") -> np.ndarray:
    """
    Rank-one E with unit row sums (axis='rows') or column sums (axis='columns') for A + E.

    ||E||_2 = ||A e - e||_2 / sqrt(n) (resp. ||A' e - e||_2 / sqrt(n)).
    """
    a = as_matrix(a, "a")
    n = require_square(a, "a")
    e = np.ones(n)
    if axis == "rows":
        return frozen(np.outer(e - a @ e, e) / n)
    if axis == "columns":
        return frozen(np.outer(e, e - a.T @ e) / n)
    raise DomainError(f"axis must be 'rows' or 'columns', got {axis!r}")


def orthogonal_witness(a) -> Tuple[np.ndarray, float]:
    """
    Nearby orthogonal matrix obtained by re-orthogonalizing ``a`` with Householder QR.

    Returns:
        (q, ||a - q||_2)
    """
    a = as_matrix(a, "a")
    require_square(a, "a")
    q = qr_householder(a).q
    return q, spectral_norm(a - q)
