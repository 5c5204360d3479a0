"""Z-score standardization shared by map training, steering, and classification.

One fitted :class:`ScalingParams` record travels with a trained map so that
scenario profiles and new cases pass through exactly the transform the map
was trained under. Constant columns scale to 0 instead of dividing by zero;
the affected features are reported as warnings.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .dataset import CaseDataset
from .errors import LengthMismatch
from .validation import as_float_matrix, as_float_vector, check_fitted


@dataclass(frozen=True)
class ScalingParams:
    """Frozen per-feature mean/sd transform (sample sd, divisor n-1)."""

    mean: tuple[float, ...]
    sd: tuple[float, ...]
    enabled: bool

    def __post_init__(self):
        object.__setattr__(self, "mean", tuple(float(v) for v in self.mean))
        object.__setattr__(self, "sd", tuple(float(v) for v in self.sd))
        if len(self.mean) != len(self.sd):
            raise LengthMismatch("mean and sd lengths differ")
        if any(s < 0 for s in self.sd):
            raise ValueError("standard deviation must be >= 0")

    @property
    def n_features(self) -> int:
        return len(self.mean)

    def constant_features(self) -> list[int]:
        return [j for j, s in enumerate(self.sd) if s == 0.0]

    def to_dict(self) -> dict:
        return {"mean": list(self.mean), "sd": list(self.sd), "enabled": self.enabled}

    @classmethod
    def from_dict(cls, d: dict) -> "ScalingParams":
        return cls(mean=tuple(d["mean"]), sd=tuple(d["sd"]), enabled=bool(d["enabled"]))


def fit_scaling(data: CaseDataset, enabled: bool = True) -> ScalingParams:
    """Fit per-feature mean and sample sd on a dataset.

    With ``enabled=False`` the params still record the column stats but
    :func:`apply_scaling` becomes the identity.
    """
    if data.n_cases == 0:
        raise ValueError("cannot fit scaling on an empty dataset")
    mean = data.values.mean(axis=0)
    if data.n_cases > 1:
        sd = data.values.std(axis=0, ddof=1)
    else:
        sd = np.zeros(data.n_features)
    params = ScalingParams(mean=tuple(mean), sd=tuple(sd), enabled=enabled)
    if enabled and params.constant_features():
        names = [data.feature_names[j] for j in params.constant_features()]
        warnings.warn(
            f"constant features scale to 0: {names}", UserWarning, stacklevel=2
        )
    return params


def apply_scaling(params: ScalingParams, row) -> np.ndarray:
    """Transform one raw-unit row into scaled space ((x-mean)/sd, 0 if sd=0)."""
    vec = as_float_vector(row, length=params.n_features)
    if not params.enabled:
        return vec.copy()
    mean = np.asarray(params.mean)
    sd = np.asarray(params.sd)
    out = np.zeros_like(vec)
    nonzero = sd > 0
    out[nonzero] = (vec[nonzero] - mean[nonzero]) / sd[nonzero]
    return out


def apply_scaling_matrix(params: ScalingParams, X: np.ndarray) -> np.ndarray:
    X = as_float_matrix(X)
    if X.shape[1] != params.n_features:
        raise LengthMismatch(
            f"matrix has {X.shape[1]} columns, expected {params.n_features}"
        )
    if not params.enabled:
        return X.copy()
    mean = np.asarray(params.mean)
    sd = np.asarray(params.sd)
    out = np.zeros_like(X)
    nonzero = sd > 0
    out[:, nonzero] = (X[:, nonzero] - mean[nonzero]) / sd[nonzero]
    return out


def invert_scaling_matrix(params: ScalingParams, X: np.ndarray) -> np.ndarray:
    """Map scaled-space rows back to raw units (constant features -> mean)."""
    X = as_float_matrix(X)
    if not params.enabled:
        return X.copy()
    mean = np.asarray(params.mean)
    sd = np.asarray(params.sd)
    out = X * sd + mean
    const = sd == 0
    if const.any():
        out[:, const] = mean[const]
    return out


class ProfileScaler(TransformerMixin, BaseEstimator):
    """Sklearn-style wrapper around :class:`ScalingParams`.

    Parameters
    ----------
    enabled : bool, default=True
        When False, transform is the identity (stats are still recorded).
    """

    def __init__(self, enabled: bool = True):
        self.enabled = enabled

    def fit(self, X, y=None):
        X = as_float_matrix(X)
        mean = X.mean(axis=0)
        sd = X.std(axis=0, ddof=1) if X.shape[0] > 1 else np.zeros(X.shape[1])
        self.params_ = ScalingParams(tuple(mean), tuple(sd), self.enabled)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_fitted(self, "params_")
        return apply_scaling_matrix(self.params_, X)

    def inverse_transform(self, X):
        check_fitted(self, "params_")
        return invert_scaling_matrix(self.params_, X)
