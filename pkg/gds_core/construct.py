"""
Constructors for generalized doubly stochastic (g.d.s.) matrices.

A square matrix is g.d.s. when A e = e and A' e = e, with e the all-ones vector.
Every constructor here conjugates a block matrix B with B e_1 = e_1 and
B' e_1 = e_1 by an orthogonal Q whose first column is e / sqrt(n); the set of
such Q is called U_n below.
"""
import logging
import math

import numpy as np

from gds_core.config import ORTHOGONALITY_INPUT_TOL, BLOCK_STRUCTURE_TOL
from gds_core.dense import (
    as_matrix, frozen, require_square, block_diag, householder_reflector,
    qr_householder, kron, orthogonality_within, orthogonality_error,
)
from gds_core.errors import DimensionError, DomainError, NotOrthogonalError, StructureError
from gds_core.models import EigSpec, YbeSeedSpec
from gds_core.verify import gds_report, ybe_residual

logger = logging.getLogger(__name__)

Z_RANGE_MESSAGE = "z should be in the interval [-1/3,1]"


# ============ Validation helpers ============

def _require_orthogonal(a: np.ndarray, name: str) -> None:
    if not orthogonality_within(a, ORTHOGONALITY_INPUT_TOL):
        raise NotOrthogonalError(
            f"input not orthogonal: ||I - {name}'{name}||_2 = {orthogonality_error(a):.3e} "
            f"exceeds {ORTHOGONALITY_INPUT_TOL:g}"
        )


def _require_un(q: np.ndarray, name: str) -> None:
    n = require_square(q, name)
    _require_orthogonal(q, name)
    deviation = float(np.linalg.norm(q[:, 0] - 1.0 / math.sqrt(n)))
    if deviation > ORTHOGONALITY_INPUT_TOL:
        raise StructureError(
            f"{name} is not in U_n: first column deviates from e/sqrt(n) by {deviation:.3e}"
        )


def _check_z(z: float) -> float:
    z = float(z)
    if not math.isfinite(z) or z > 1 or z < -1 / 3:
        raise DomainError(Z_RANGE_MESSAGE)
    return z


def _circulant3(x: float, y: float, z: float) -> np.ndarray:
    # symmetric by pattern: each value is written, never recomputed
    return frozen(np.array([[x, y, z],
                            [y, z, x],
                            [z, x, y]], dtype=np.float64))


_ANTI_DIAGONAL_3 = ((0.0, 0.0, 1.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0))
_SWAP_FIRST_TWO_3 = ((0.0, 1.0, 0.0), (1.0, 0.0, 0.0), (0.0, 0.0, 1.0))


# ============ 3 x 3 symmetric orthogonal g.d.s. ============

def build_gds3_stable(z: float) -> np.ndarray:
    """
    Symmetric orthogonal g.d.s. 3x3 matrix [[x,y,z],[y,z,x],[z,x,y]].

    x is the larger root of t^2 - t(1-z) - z(1-z) = 0, obtained by adding two
    non-negative numbers; y follows from x*y = z(z-1). Accurate for every z.

    Args:
        z: Value in [-1/3, 1]

    Raises:
        DomainError: If z is outside [-1/3, 1]
    """
    z = _check_z(z)
    t = 1.0 - z
    if t == 0.0:
        return frozen(np.array(_ANTI_DIAGONAL_3))
    delta = t * (1.0 + 3.0 * z)
    x = (t + math.sqrt(delta)) / 2.0
    y = -z * t / x
    return _circulant3(x, y, z)


def build_gds3_unstable(z: float) -> np.ndarray:
    """
    Same pattern as build_gds3_stable but with the smaller root x = (1-z-sqrt(D))/2.

    UNSTABLE for z near 0: 1-z and sqrt(D) nearly cancel and x loses most of its
    significant digits (about 1e-3 orthogonality error at z = 1e-14). Kept to
    demonstrate the cancellation; use build_gds3_stable for real work.

    Raises:
        DomainError: If z is outside [-1/3, 1], or x cancels to exactly zero
    """
    z = _check_z(z)
    t = 1.0 - z
    if t == 0.0:
        return frozen(np.array(_ANTI_DIAGONAL_3))
    if z == 0.0:
        return frozen(np.array(_SWAP_FIRST_TWO_3))
    delta = t * (1.0 + 3.0 * z)
    x = (t - math.sqrt(delta)) / 2.0
    if x == 0.0:
        raise DomainError(f"smaller root cancelled to zero for z={z!r}; the unstable formula cannot evaluate it")
    y = -z * t / x
    return _circulant3(x, y, z)


# ============ Bases in U_n ============

def un_from_reflector(n: int) -> np.ndarray:
    """
    Symmetric member of U_n: Q = -H for the reflector with z = e + sqrt(n) e_1.

    Raises:
        DomainError: If n < 1
    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    z = np.ones(n)
    z[0] += math.sqrt(n)
    return frozen(-householder_reflector(z))


def extend_to_un_basis(x) -> np.ndarray:
    """
    Orthogonal Q with first column e/sqrt(n), completed from columns 2..n of x.

    Column 1 of x is overwritten with e/sqrt(n) and the result is factored by
    Householder QR; with diag(r) >= 0 the first column of q is e/sqrt(n) itself.
    Rank-deficient x is fine: QR still returns a full orthogonal q.

    Args:
        x: Arbitrary square matrix

    Raises:
        DimensionError: If x is not square
    """
    x = as_matrix(x, "X")
    rows, cols = x.shape
    if rows != cols:
        raise DimensionError(f"X should be a square matrix, got {rows}x{cols}")
    x[:, 0] = 1.0 / math.sqrt(rows)
    return qr_householder(x).q


def compose_un_basis(q, w) -> np.ndarray:
    """
    Another member of U_n: Q * blockdiag(1, W) for orthogonal W of order n-1.

    Raises:
        DimensionError: If w is not (n-1)x(n-1)
        NotOrthogonalError / StructureError: If q is not in U_n or w not orthogonal
    """
    q = as_matrix(q, "q")
    w = as_matrix(w, "w")
    n = require_square(q, "q")
    if w.shape != (n - 1, n - 1):
        raise DimensionError(f"Size of w should be equal to n-1 = {n - 1}, got {w.shape[0]}x{w.shape[1]}")
    _require_un(q, "q")
    _require_orthogonal(w, "w")
    return frozen(q @ block_diag([np.ones((1, 1)), w]))


# ============ General g.d.s. from a block ============

def build_gds_from_block(q, w, orthogonal: bool = True) -> np.ndarray:
    """
    A = Q B Q' with B = [[1, 0'], [0, W]].

    A is g.d.s. for any block W, and orthogonal exactly when W is. By default W
    must be orthogonal; pass orthogonal=False to build a general g.d.s. matrix.

    Args:
        q: Member of U_n
        w: Block of order n-1
        orthogonal: Require w to be orthogonal

    Raises:
        DimensionError: If w is not (n-1)x(n-1)
        NotOrthogonalError: If q (or w in orthogonal mode) fails the 1e-8 check
        StructureError: If the first column of q is not e/sqrt(n)
    """
    q = as_matrix(q, "q")
    w = as_matrix(w, "w")
    n = require_square(q, "q")
    if w.shape != (n - 1, n - 1):
        raise DimensionError(f"Size of w should be equal to n-1 = {n - 1}, got {w.shape[0]}x{w.shape[1]}")
    _require_un(q, "q")
    if orthogonal:
        _require_orthogonal(w, "w")

    b = block_diag([np.ones((1, 1)), w])
    a = (q @ b) @ q.T
    logger.debug(f"built g.d.s. matrix of order {n} from block (orthogonal={orthogonal})")
    return frozen(a)


def recover_block(a, q) -> np.ndarray:
    """
    Inverse of build_gds_from_block: the trailing block of Q' A Q.

    Args:
        a: g.d.s. matrix (row and column sums one to 1e-8)
        q: Member of U_n

    Returns:
        Block X of order n-1

    Raises:
        StructureError: If a is not g.d.s. or Q' A Q lacks the [[1, 0'], [0, X]] shape
    """
    a = as_matrix(a, "a")
    q = as_matrix(q, "q")
    n = require_square(a, "a")
    if q.shape != (n, n):
        raise DimensionError(f"q must be {n}x{n}, got {q.shape[0]}x{q.shape[1]}")
    _require_un(q, "q")

    report = gds_report(a)
    if max(report.err_rows, report.err_columns) > ORTHOGONALITY_INPUT_TOL:
        raise StructureError(
            f"input is not g.d.s. relative to q: row/column sum errors "
            f"{report.err_rows:.3e} / {report.err_columns:.3e}"
        )

    b = (q.T @ a) @ q
    corner = abs(b[0, 0] - 1.0)
    edge = max(float(np.abs(b[0, 1:]).max(initial=0.0)), float(np.abs(b[1:, 0]).max(initial=0.0)))
    if corner > BLOCK_STRUCTURE_TOL or edge > BLOCK_STRUCTURE_TOL:
        raise StructureError(
            f"input is not g.d.s. relative to q: |B11 - 1| = {corner:.3e}, "
            f"max off-block entry = {edge:.3e}"
        )
    return frozen(np.ascontiguousarray(b[1:, 1:]))


# ============ Prescribed spectrum ============

def rotation_block(z: complex) -> np.ndarray:
    """2x2 rotation [[c, s], [-s, c]] with eigenvalues c +/- i s."""
    c, s = float(z.real), float(z.imag)
    return np.array([[c, s], [-s, c]])


def build_eig_gds(spec: EigSpec, q) -> np.ndarray:
    """
    Orthogonal g.d.s. matrix with eigenvalues +1 (r times), -1 (p times) and c_k +/- i s_k.

    B = blockdiag(I_r, -I_p, R_1, ..., R_m) and A = Q B Q'. The leading +1 keeps
    B e_1 = e_1, which is why r = 0 is rejected.

    Args:
        spec: Prescribed spectrum
        q: Member of U_n with n = r + p + 2m

    Raises:
        DomainError: r = 0, pair off the unit circle, real pair
        DimensionError: q is not n x n
    """
    spec.validate()
    q = as_matrix(q, "q")
    n = require_square(q, "q")
    if n != spec.n:
        raise DimensionError(
            f"q is {n}x{n} but r + p + 2m = {spec.r} + {spec.p} + {2 * spec.m} = {spec.n}"
        )
    _require_un(q, "q")

    blocks = [np.eye(spec.r)]
    if spec.p:
        blocks.append(-np.eye(spec.p))
    blocks.extend(rotation_block(z) for z in spec.pairs)
    b = block_diag(blocks)
    logger.debug(f"building eig g.d.s.: r={spec.r}, p={spec.p}, m={spec.m}, n={n}")
    return frozen((q @ b) @ q.T)


# ============ Yang-Baxter solutions ============

def perfect_shuffle(n: int) -> np.ndarray:
    """
    Index form of the permutation read column by column from S = [[1, 2, ..., n], [n+1, ...], ...].

    Entry j is the (0-based) row holding the single 1 of column j of P.
    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    j = np.arange(n * n)
    return frozen((j % n) * n + j // n)


def build_ybe_seed(spec: YbeSeedSpec) -> np.ndarray:
    """
    Yang-Baxter solution X = D P with D = diag(d) and P the perfect-shuffle permutation.

    X e_1 = d_1 e_1 and X' e_1 = d_1 e_1. Only the index vector of P is formed;
    the n^2 nonzeros are scattered straight into X.

    Raises:
        DimensionError: If d does not hold n^2 entries
    """
    spec.validate()
    size = spec.n * spec.n
    d = np.asarray(spec.d, dtype=np.float64)
    perm = perfect_shuffle(spec.n)
    x = np.zeros((size, size))
    x[perm, np.arange(size)] = d[perm]
    return frozen(x)


def build_ybe_gds(b, p) -> np.ndarray:
    """
    Orthogonal g.d.s. Yang-Baxter solution A = (P kron P) B (P kron P)'.

    Args:
        b: Orthogonal n^2 x n^2 Yang-Baxter solution with B e_1 = e_1 and B' e_1 = e_1
        p: Member of U_n

    Raises:
        DimensionError: If b is not n^2 x n^2
        NotOrthogonalError / StructureError: If a precondition fails to 1e-8
    """
    p = as_matrix(p, "p")
    b = as_matrix(b, "b")
    n = require_square(p, "p")
    size = n * n
    if b.shape != (size, size):
        raise DimensionError(f"Wrong dimensions! b must be {size}x{size} for p of order {n}, got {b.shape[0]}x{b.shape[1]}")
    _require_un(p, "p")
    _require_orthogonal(b, "b")

    e1 = np.zeros(size)
    e1[0] = 1.0
    column_dev = float(np.linalg.norm(b[:, 0] - e1))
    row_dev = float(np.linalg.norm(b[0, :] - e1))
    if max(column_dev, row_dev) > ORTHOGONALITY_INPUT_TOL:
        raise StructureError(
            f"b must satisfy B e_1 = e_1 and B' e_1 = e_1; deviations {column_dev:.3e} / {row_dev:.3e}"
        )
    residual = ybe_residual(b)
    if residual > ORTHOGONALITY_INPUT_TOL:
        raise StructureError(f"b does not satisfy the Yang-Baxter equation: residual {residual:.3e}")

    q = kron(p, p)
    return frozen((q @ b) @ q.T)


def conjugate_ybe(x, p) -> np.ndarray:
    """
    (P kron P) X (P kron P)^-1 for any nonsingular P; preserves the Yang-Baxter equation.

    Computed by a linear solve rather than an explicit inverse.

    Raises:
        DimensionError: If x is not n^2 x n^2
        DomainError: If p is singular
    """
    x = as_matrix(x, "x")
    p = as_matrix(p, "p")
    n = require_square(p, "p")
    size = n * n
    if x.shape != (size, size):
        raise DimensionError(f"Wrong dimensions! x must be {size}x{size} for p of order {n}, got {x.shape[0]}x{x.shape[1]}")
    k = np.kron(p, p)
    try:
        # Y K = K X  <=>  K' Y' = (K X)'
        y = np.linalg.solve(k.T, (k @ x).T).T
    except np.linalg.LinAlgError:
        raise DomainError("p is singular") from None
    return frozen(np.ascontiguousarray(y))

