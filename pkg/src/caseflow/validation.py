"""Input validation helpers used by the estimators and domain operations."""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatch, NonFiniteValue


def as_float_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float64 array and require every value finite."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{name} contains NaN or infinite values")
    return arr


def as_float_vector(x, length: int | None = None, name: str = "row") -> np.ndarray:
    arr = np.asarray(x, dtype=float).ravel()
    if length is not None and arr.shape[0] != length:
        raise LengthMismatch(
            f"{name} has length {arr.shape[0]}, expected {length}"
        )
    if arr.size and not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{name} contains NaN or infinite values")
    return arr


def check_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise RuntimeError(
            f"{type(estimator).__name__} is not fitted; call fit() first"
        )
