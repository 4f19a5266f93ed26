"""
Data structures shared by the constructors, the verifiers and the experiment harness.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Dict, Any, Tuple, Union

import numpy as np

from gds_core.config import UNIT_CIRCLE_TOL, DEFAULT_SIZES, DEFAULT_Z_VALUES
from gds_core.errors import DomainError, DimensionError, UnknownExperimentError


@dataclass(frozen=True)
class QrResult:
    """Householder QR factors: q orthogonal, r upper triangular with diag(r) >= 0."""
    q: np.ndarray
    r: np.ndarray


@dataclass(frozen=True)
class EigSpec:
    """
    Prescribed spectrum for an orthogonal g.d.s. matrix.

    Each entry of ``pairs`` stands for a conjugate pair c +/- i*s; only one
    representative is listed.
    """
    r: int
    p: int = 0
    pairs: Tuple[complex, ...] = ()

    @property
    def m(self) -> int:
        """Number of rotation blocks."""
        return len(self.pairs)

    @property
    def n(self) -> int:
        """Dimension of the matrix this spectrum describes."""
        return self.r + self.p + 2 * self.m

    def validate(self) -> None:
        """
        Check the spectrum can be realised by an orthogonal g.d.s. matrix.

        Raises:
            DomainError: r < 1, p < 0, a pair off the unit circle or a pair with s = 0
        """
        if self.r < 1:
            raise DomainError("r must be at least 1")
        if self.p < 0:
            raise DomainError(f"p must be non-negative, got {self.p}")
        for k, z in enumerate(self.pairs):
            c, s = z.real, z.imag
            if not (math.isfinite(c) and math.isfinite(s)):
                raise DomainError(f"eigenvalue pair {k} is not finite: {z}")
            if abs(c * c + s * s - 1.0) > UNIT_CIRCLE_TOL:
                raise DomainError(f"eigenvalue off unit circle: pair {k} = {z} has |z|^2 = {c * c + s * s!r}")
            if s == 0:
                raise DomainError(f"eigenvalue pair {k} = {z} is real; declare it through r or p")

    def to_dict(self) -> Dict[str, Any]:
        """Convert spectrum to dictionary."""
        return {
            'r': self.r,
            'p': self.p,
            'pairs': [[z.real, z.imag] for z in self.pairs],
            'n': self.n,
        }


@dataclass(frozen=True)
class YbeSeedSpec:
    """Base dimension n and scaling vector d (length n^2) for the Yang-Baxter seed."""
    n: int
    d: Tuple[float, ...]

    def validate(self) -> None:
        """
        Raises:
            DomainError: n < 2 or non-finite d
            DimensionError: d does not hold n^2 entries
        """
        if self.n < 2:
            raise DomainError(f"n must be at least 2, got {self.n}")
        if len(self.d) != self.n * self.n:
            raise DimensionError(
                f"Wrong dimensions: d must have n^2 = {self.n * self.n} entries, got {len(self.d)}"
            )
        if not all(math.isfinite(v) for v in self.d):
            raise DomainError("d holds non-finite entries")

    def validate_orthogonal(self) -> None:
        """
        Extra conditions for feeding the orthogonal YBE construction: d_1 = 1 and |d_i| = 1.

        Raises:
            DomainError: If any condition fails
        """
        self.validate()
        if abs(self.d[0] - 1.0) > UNIT_CIRCLE_TOL:
            raise DomainError(f"d_1 must equal 1 for an orthogonal g.d.s. seed, got {self.d[0]}")
        off = [i + 1 for i, v in enumerate(self.d) if abs(abs(v) - 1.0) > UNIT_CIRCLE_TOL]
        if off:
            raise DomainError(f"|d_i| must equal 1 for every i; violated at positions {off}")

    def to_dict(self) -> Dict[str, Any]:
        """Convert seed spec to dictionary."""
        return {'n': self.n, 'd': list(self.d)}


@dataclass(frozen=True)
class GdsReport:
    """Orthogonality and row/column-sum errors of a square matrix."""
    err_orth: float
    err_rows: float
    err_columns: float
    n: int

    @property
    def max_error(self) -> float:
        """Largest of the three statistics."""
        return max(self.err_orth, self.err_rows, self.err_columns)

    def to_dict(self) -> Dict[str, Any]:
        """Convert report to dictionary."""
        return {
            'n': self.n,
            'err_orth': self.err_orth,
            'err_rows': self.err_rows,
            'err_columns': self.err_columns,
        }


class ExperimentId(Enum):
    """Reproducible experiments."""
    TABLE1 = "table1"
    TABLE2 = "table2"
    TABLE3 = "table3"
    TABLE4 = "table4"
    EXAMPLE4 = "example4"
    EXAMPLE5 = "example5"

    @classmethod
    def parse(cls, value: str) -> "ExperimentId":
        """
        Look up an experiment id by its string value.

        Raises:
            UnknownExperimentError: Listing the valid ids
        """
        try:
            return cls(value)
        except ValueError:
            valid = ", ".join(e.value for e in cls)
            raise UnknownExperimentError(f"unknown experiment id '{value}'; valid ids: {valid}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuration of a single experiment run."""
    experiment: ExperimentId
    seed: int = 0
    sizes: Tuple[int, ...] = ()
    z_values: Tuple[float, ...] = ()

    @classmethod
    def default(cls, experiment: ExperimentId, seed: int = 0) -> "ExperimentConfig":
        """Build the configuration with the parameter grid the tables use."""
        sizes: Tuple[int, ...] = ()
        z_values: Tuple[float, ...] = ()
        if experiment in (ExperimentId.TABLE1, ExperimentId.TABLE2):
            z_values = DEFAULT_Z_VALUES
        elif experiment in (ExperimentId.TABLE3, ExperimentId.TABLE4):
            sizes = DEFAULT_SIZES
        return cls(experiment=experiment, seed=seed, sizes=sizes, z_values=z_values)

    def validate(self) -> None:
        """
        Raises:
            DomainError: Empty parameter grid, bad size or out-of-range seed
        """
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.experiment in (ExperimentId.TABLE1, ExperimentId.TABLE2) and not self.z_values:
            raise DomainError(f"{self.experiment.value} needs at least one z value")
        if self.experiment in (ExperimentId.TABLE3, ExperimentId.TABLE4):
            if not self.sizes:
                raise DomainError(f"{self.experiment.value} needs at least one size")
            if min(self.sizes) < 2:
                raise DomainError(f"sizes must be at least 2, got {list(self.sizes)}")

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary."""
        return {
            'experiment': self.experiment.value,
            'seed': self.seed,
            'sizes': list(self.sizes),
            'z_values': list(self.z_values),
        }


@dataclass
class ExperimentRow:
    """One line of an experiment table. Unmeasured statistics stay None."""
    param: Union[int, float]
    err_orth: float
    err_rows: Optional[float] = None
    err_columns: Optional[float] = None
    residual: Optional[float] = None
    passed: bool = field(default=True)

    def values(self) -> Tuple[float, ...]:
        """All recorded (non-None) statistics."""
        recorded = (self.err_orth, self.err_rows, self.err_columns, self.residual)
        return tuple(v for v in recorded if v is not None)

    def to_dict(self) -> Dict[str, Any]:
        """Convert row to dictionary."""
        return {
            'param': self.param,
            'err_orth': self.err_orth,
            'err_rows': self.err_rows,
            'err_columns': self.err_columns,
            'residual': self.residual,
            'passed': self.passed,
        }
