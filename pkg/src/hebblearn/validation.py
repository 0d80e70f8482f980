"""Input validation helpers used by the estimators and the functional core."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import InvalidInputError

UNIT_NORM_TOL = 1e-6


def as_matrix(x, name: str = "X") -> np.ndarray:
    """Coerce to a C-contiguous 2-D float64 array, rejecting anything else."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def as_vector(x, name: str = "x") -> np.ndarray:
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def check_unit_rows(X: np.ndarray, tol: float = UNIT_NORM_TOL, name: str = "X") -> None:
    norms = np.linalg.norm(X, axis=1)
    bad = np.abs(norms - 1.0) > tol
    if np.any(bad):
        i = int(np.argmax(bad))
        raise InvalidInputError(
            f"rows of {name} must be L2-unit vectors (tolerance {tol:g}); "
            f"row {i} has norm {norms[i]:.9g}"
        )


def check_unit_vector(x: np.ndarray, tol: float = UNIT_NORM_TOL, name: str = "x") -> None:
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > tol:
        raise InvalidInputError(
            f"{name} must be an L2-unit vector (tolerance {tol:g}); got norm {norm:.9g}"
        )


def normalize_rows(X: np.ndarray, guard: float = 1e-12) -> np.ndarray:
    """Scale each row to unit L2 norm; rows with norm below ``guard`` are left zero."""
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    safe = np.where(norms > guard, norms, 1.0)
    return X / safe


def check_range(value, lo, hi, name: str, *, lo_open: bool = False, hi_open: bool = False) -> None:
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise InvalidInputError(f"{name} must be a real number, got {value!r}")
    if lo is not None and (value <= lo if lo_open else value < lo):
        bound = "(" if lo_open else "["
        raise InvalidInputError(f"{name} must be in {bound}{lo}, {hi}], got {value}")
    if hi is not None and (value >= hi if hi_open else value > hi):
        bound = ")" if hi_open else "]"
        raise InvalidInputError(f"{name} must be in [{lo}, {hi}{bound}, got {value}")


def as_rng(seed) -> np.random.Generator:
    """Accept a Generator, a SeedSequence, or anything default_rng accepts."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
