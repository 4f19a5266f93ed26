"""
Dense real matrix kernels - products, Kronecker products, Householder QR and norms.

Matrices are float64 numpy arrays. Every function returns a fresh read-only
array, so results can be shared between threads without copying.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from gds_core.config import Config
from gds_core.errors import DimensionError, DomainError, NonFiniteError
from gds_core.models import QrResult

logger = logging.getLogger(__name__)


def as_matrix(a, name: str = "a") -> np.ndarray:
    """
    Copy ``a`` into a 2-D float64 array and check every entry is finite.

    Args:
        a: Array-like input
        name: Argument name used in error messages

    Returns:
        Writable float64 copy of ``a``
    """
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise NonFiniteError(f"{name} holds NaN or Inf entries")
    return m


def frozen(a: np.ndarray) -> np.ndarray:
    """Mark ``a`` read-only and return it."""
    a.setflags(write=False)
    return a


def require_square(a: np.ndarray, name: str = "a") -> int:
    """Return the order of a square matrix or raise DimensionError."""
    rows, cols = a.shape
    if rows != cols:
        raise DimensionError(f"{name} must be square, got {rows}x{cols}")
    return rows


def identity(n: int) -> np.ndarray:
    """n x n identity."""
    return frozen(np.eye(n))


def mat_mul(a, b) -> np.ndarray:
    """
    Matrix product a*b.

    Raises:
        DimensionError: If a.cols != b.rows (both shapes are named)
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    return frozen(a @ b)


def transpose(a) -> np.ndarray:
    """Transposed copy of ``a``."""
    return frozen(np.ascontiguousarray(as_matrix(a).T))


def kron(a, b) -> np.ndarray:
    """
    Kronecker product: block (i, j) of the result is a[i, j] * b.

    Raises:
        DimensionError: If the result would not be addressable
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    limit = np.iinfo(np.intp).max
    if rows > limit or cols > limit or rows * cols > limit:
        raise DimensionError(f"Kronecker product of {a.shape} and {b.shape} overflows the index type")
    return frozen(np.kron(a, b))


def block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """Block-diagonal matrix assembled from square or rectangular blocks."""
    mats = [as_matrix(blk, "block") for blk in blocks]
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols))
    i = j = 0
    for m in mats:
        out[i:i + m.shape[0], j:j + m.shape[1]] = m
        i += m.shape[0]
        j += m.shape[1]
    return frozen(out)


def householder_reflector(z) -> np.ndarray:
    """
    Householder reflector H = I - (2 / z'z) z z'.

    H is built as I minus a scaled outer product, which is exactly symmetric.

    Args:
        z: Nonzero real vector

    Raises:
        DomainError: If z is the zero vector
    """
    z = np.array(z, dtype=np.float64).ravel()
    if z.size == 0 or not np.isfinite(z).all():
        raise DomainError("reflector vector must be a non-empty finite vector")
    zz = float(z @ z)
    if zz == 0.0:
        raise DomainError("zero reflector vector")
    return frozen(np.eye(z.size) - (2.0 / zz) * np.outer(z, z))


def qr_householder(x) -> QrResult:
    """
    Householder QR factorization of a square matrix, normalized so diag(r) >= 0.

    Each step reflects the pivot column onto alpha*e_1 with sign(alpha) = -sign(x_k),
    so forming v = x - alpha*e_1 never subtracts nearly equal numbers. Columns that
    are already zero below the diagonal are skipped, which lets rank-deficient
    inputs through with zeros on the diagonal of r.

    Args:
        x: Square matrix

    Returns:
        QrResult with orthogonal q and upper triangular r, x = q r

    Raises:
        DimensionError: If x is not square
    """
    r = as_matrix(x, "x")
    n = require_square(r, "x")
    reflectors = []

    for k in range(n - 1):
        col = r[k:, k]
        norm = float(np.linalg.norm(col))
        if norm == 0.0:
            logger.debug(f"QR step {k}: zero column, rank deficient input")
            reflectors.append(None)
            continue
        alpha = -norm if col[0] >= 0 else norm
        v = col.copy()
        v[0] -= alpha
        vv = float(v @ v)
        trailing = r[k:, k:]
        trailing -= np.outer(v, (2.0 / vv) * (v @ trailing))
        r[k, k] = alpha
        r[k + 1:, k] = 0.0
        reflectors.append((v, vv))

    # Q = H_0 H_1 ... H_{n-2}, accumulated right to left on the trailing block only
    q = np.eye(n)
    for k in reversed(range(n - 1)):
        if reflectors[k] is None:
            continue
        v, vv = reflectors[k]
        trailing = q[k:, k:]
        trailing -= np.outer(v, (2.0 / vv) * (v @ trailing))

    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    q *= signs
    r *= signs[:, None]
    r = np.triu(r)
    return QrResult(q=frozen(q), r=frozen(r))


def frobenius_norm(a) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(as_matrix(a)))


def spectral_norm(a, max_iter: Optional[int] = None, rtol: Optional[float] = None) -> float:
    """
    Largest singular value of ``a`` by power iteration on a'a.

    The matrix is scaled by its largest entry first so the Gram matrix neither
    overflows nor underflows. The start vector is all-ones plus 1/(i+1) in
    coordinate i. Iteration stops once successive Rayleigh quotients agree to
    ``rtol`` relative, or after ``max_iter`` steps with the best estimate so far.

    Args:
        a: Any real matrix
        max_iter: Iteration cap (default Config.POWER_MAX_ITER)
        rtol: Relative Rayleigh quotient tolerance (default Config.POWER_RTOL)

    Returns:
        ||a||_2, 0.0 for the zero matrix
    """
    a = as_matrix(a)
    max_iter = Config.POWER_MAX_ITER if max_iter is None else max_iter
    rtol = Config.POWER_RTOL if rtol is None else rtol

    scale = float(np.abs(a).max())
    if scale == 0.0:
        return 0.0
    b = a / scale
    g = b.T @ b
    n = g.shape[0]

    v = np.ones(n) + 1.0 / np.arange(1, n + 1)
    v /= np.linalg.norm(v)
    if not (g @ v).any():
        # start vector in the null space; restart from the heaviest column of g
        v = g[:, int(np.argmax(np.linalg.norm(g, axis=0)))].copy()
        v /= np.linalg.norm(v)

    lam = 0.0
    best = 0.0
    for it in range(max_iter):
        w = g @ v
        lam_new = float(v @ w)
        best = max(best, lam_new)
        wn = float(np.linalg.norm(w))
        if wn == 0.0:
            break
        v = w / wn
        if abs(lam_new - lam) <= rtol * lam_new:
            logger.debug(f"spectral_norm converged after {it + 1} iterations (n={n})")
            break
        lam = lam_new
    else:
        logger.debug(f"spectral_norm hit the iteration cap {max_iter} (n={n})")

    return scale * math.sqrt(max(best, 0.0))


def orthogonality_error(a) -> float:
    """||I - a'a||_2 for a square matrix."""
    a = as_matrix(a)
    n = require_square(a)
    return spectral_norm(np.eye(n) - a.T @ a)


def orthogonality_within(a, tol: float) -> bool:
    """
    True iff ||I - a'a||_2 <= tol.

    The Frobenius norm bounds the spectral norm from above, so the cheap test
    settles most well-conditioned inputs without any iteration.
    """
    a = as_matrix(a)
    n = require_square(a)
    e = np.eye(n) - a.T @ a
    if float(np.linalg.norm(e)) <= tol:
        return True
    return spectral_norm(e) <= tol
