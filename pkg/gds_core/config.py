"""
Configuration management for the g.d.s. matrix toolkit.
Handles environment variables and numerical tolerances.
"""
import math
import os
from dotenv import load_dotenv
from typing import Callable, Optional, Union

load_dotenv()


def env_number(name: str, default: str, kind: Callable[[str], Union[int, float]]) -> Optional[Union[int, float]]:
    """Parse a numeric environment variable; None when it is malformed, so validate() can report it."""
    try:
        return kind(os.getenv(name, default))
    except ValueError:
        return None


def _positive(value) -> bool:
    return value is not None and 0 < value < math.inf


class Config:
    """Configuration class for managing environment variables."""

    # Reproducibility
    DEFAULT_SEED: str = os.getenv("GDS_DEFAULT_SEED", "0")

    # Verification
    VERIFY_TOL: Optional[float] = env_number("GDS_VERIFY_TOL", "1e-10", float)

    # Logging
    LOG_LEVEL: str = os.getenv("GDS_LOG_LEVEL", "INFO").upper()
    LOG_FILE: Optional[str] = os.getenv("GDS_LOG_FILE")

    # Experiment harness
    WORKERS: Optional[int] = env_number("GDS_WORKERS", "1", int)
    RESULTS_DIR: str = os.getenv("GDS_RESULTS_DIR", "results")

    # Spectral norm power iteration
    POWER_MAX_ITER: Optional[int] = env_number("GDS_POWER_MAX_ITER", "100000", int)
    POWER_RTOL: Optional[float] = env_number("GDS_POWER_RTOL", "1e-14", float)

    @classmethod
    def default_seed(cls) -> int:
        """
        Resolve the default seed at call time.

        GDS_DEFAULT_SEED is re-read so that a changed environment is honoured
        without re-importing this module.

        Returns:
            Seed as a non-negative integer

        Raises:
            ValueError: If the variable is not a non-negative integer
        """
        raw = os.getenv("GDS_DEFAULT_SEED", cls.DEFAULT_SEED)
        seed = int(raw)
        if seed < 0 or seed >= 2 ** 64:
            raise ValueError(f"GDS_DEFAULT_SEED must be a 64-bit unsigned integer, got {raw}")
        return seed

    @classmethod
    def validate(cls) -> list[str]:
        """
        Validate configuration and return list of malformed variables.

        Returns:
            List of offending configuration keys
        """
        invalid = []

        try:
            cls.default_seed()
        except ValueError:
            invalid.append("GDS_DEFAULT_SEED")

        if not _positive(cls.VERIFY_TOL):
            invalid.append("GDS_VERIFY_TOL")

        if not _positive(cls.WORKERS):
            invalid.append("GDS_WORKERS")

        if not _positive(cls.POWER_MAX_ITER):
            invalid.append("GDS_POWER_MAX_ITER")

        if not _positive(cls.POWER_RTOL):
            invalid.append("GDS_POWER_RTOL")

        return invalid


# Caller-supplied matrices must be orthogonal to this spectral-norm deviation
ORTHOGONALITY_INPUT_TOL = 1e-8

# First row/column of Q^T A Q must vanish to this level for block recovery
BLOCK_STRUCTURE_TOL = 1e-10

# |c^2 + s^2 - 1| allowed for prescribed eigenvalue pairs
UNIT_CIRCLE_TOL = 1e-12

# Parameter grids used by the tables, in report order
DEFAULT_Z_VALUES = (1e-3, 1e-6, 1e-9, 1e-12, 1e-14)
DEFAULT_SIZES = (10, 50, 100, 500, 1000)

# Largest base dimension n for the direct n^3 x n^3 Yang-Baxter residual
YBE_MAX_BASE = 8
