"""Cluster-level scenario steering against a trained map.

The clustering's centroids are placed on the map, the user edits profile
elements in raw units, and each run re-derives the edited profile's best
matching quadrant. ``moved`` always compares against the cluster's original
(base) quadrant, so reverting an edit reports no movement. Monte Carlo
sensitivity perturbs the *change* of each edited element: with base value o,
edited value v and delta = v - o, a sample takes o + delta * (1 + u) with
u drawn uniformly from [-d, +d].

Sampling order contract (stable across versions, relied on by tests):
``numpy.random.default_rng(seed)`` produces one uniform draw per
(sample, edited feature), samples outermost, edited features in training
feature order; u = -d + 2*d*r for a raw draw r in [0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DatasetMismatch,
    InvalidDeviation,
    NoEditsToPerturb,
    NonFiniteValue,
    NotTrained,
    UnknownFeature,
)
from .kmeans import KMeansResult
from .scaling import apply_scaling_matrix
from .som import SomModel, _assign, best_matching_unit


@dataclass(frozen=True)
class ScenarioState:
    """Editable cluster profiles plus their original and latest quadrants."""

    feature_names: tuple[str, ...]
    base_profiles: tuple[tuple[float, ...], ...]
    edited_profiles: tuple[tuple[float, ...], ...]
    base_bmu: tuple[int, ...]
    current_bmu: tuple[int, ...]

    @property
    def n_clusters(self) -> int:
        return len(self.base_profiles)

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "base_profiles": [list(p) for p in self.base_profiles],
            "edited_profiles": [list(p) for p in self.edited_profiles],
            "base_bmu": list(self.base_bmu),
            "current_bmu": list(self.current_bmu),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioState":
        return cls(
            feature_names=tuple(d["feature_names"]),
            base_profiles=tuple(tuple(float(v) for v in p) for p in d["base_profiles"]),
            edited_profiles=tuple(tuple(float(v) for v in p) for p in d["edited_profiles"]),
            base_bmu=tuple(int(b) for b in d["base_bmu"]),
            current_bmu=tuple(int(b) for b in d["current_bmu"]),
        )


@dataclass(frozen=True)
class ScenarioRun:
    """Outcome of one steering step for one cluster."""

    cluster: int
    edits: dict[str, float]
    edited_profile: tuple[float, ...]
    old_bmu: int
    new_bmu: int
    moved: bool
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "cluster": self.cluster,
            "edits": {k: float(v) for k, v in self.edits.items()},
            "edited_profile": list(self.edited_profile),
            "old_bmu": self.old_bmu,
            "new_bmu": self.new_bmu,
            "moved": self.moved,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioRun":
        return cls(
            cluster=int(d["cluster"]),
            edits={k: float(v) for k, v in d["edits"].items()},
            edited_profile=tuple(float(v) for v in d["edited_profile"]),
            old_bmu=int(d["old_bmu"]),
            new_bmu=int(d["new_bmu"]),
            moved=bool(d["moved"]),
            warnings=tuple(d.get("warnings", [])),
        )


@dataclass(frozen=True)
class SensitivitySpec:
    """Monte Carlo settings: per-edited-feature deviation d in [0, 1]."""

    cluster: int
    deviation: dict[str, float]
    n_samples: int = 1000
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "cluster": self.cluster,
            "deviation": {k: float(v) for k, v in self.deviation.items()},
            "n_samples": self.n_samples,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SensitivitySpec":
        return cls(
            cluster=int(d["cluster"]),
            deviation={k: float(v) for k, v in d["deviation"].items()},
            n_samples=int(d.get("n_samples", 1000)),
            seed=int(d.get("seed", 0)),
        )


@dataclass(frozen=True)
class SensitivityHistogram:
    """BMU frequencies over the Monte Carlo samples; counts sum to n_samples."""

    cluster: int
    counts: dict[int, int]
    n_samples: int
    seed: int
    deviation: dict[str, float]
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "cluster": self.cluster,
            "counts": {str(k): int(v) for k, v in sorted(self.counts.items())},
            "n_samples": self.n_samples,
            "seed": self.seed,
            "deviation": {k: float(v) for k, v in self.deviation.items()},
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SensitivityHistogram":
        return cls(
            cluster=int(d["cluster"]),
            counts={int(k): int(v) for k, v in d["counts"].items()},
            n_samples=int(d["n_samples"]),
            seed=int(d["seed"]),
            deviation={k: float(v) for k, v in d["deviation"].items()},
            warnings=tuple(d.get("warnings", [])),
        )


def setup(model: SomModel, kmeans: KMeansResult) -> ScenarioState:
    """Place the clustering's centroids on the map; edits start at base."""
    if model is None:
        raise NotTrained("scenario setup requires a trained map")
    if len(kmeans.assignments) != len(model.assignments):
        raise DatasetMismatch("clustering and map case counts differ")
    if any(len(c) != len(model.feature_names) for c in kmeans.centroids):
        raise DatasetMismatch("centroid width does not match map features")
    base = tuple(tuple(float(v) for v in c) for c in kmeans.centroids)
    bmus = tuple(best_matching_unit(model, c).bmu for c in base)
    return ScenarioState(
        feature_names=model.feature_names,
        base_profiles=base,
        edited_profiles=base,
        base_bmu=bmus,
        current_bmu=bmus,
    )


def _range_warnings(model: SomModel, profile: np.ndarray) -> list[str]:
    notes = []
    for j, name in enumerate(model.feature_names):
        v = profile[j]
        lo, hi = model.feature_min[j], model.feature_max[j]
        if v < lo or v > hi:
            notes.append(
                f"feature {name!r} value {v!r} extrapolates beyond training "
                f"range [{lo!r}, {hi!r}]"
            )
    return notes


def run_scenario(
    state: ScenarioState,
    model: SomModel,
    cluster: int,
    edits: dict[str, float],
) -> tuple[ScenarioRun, ScenarioState]:
    """Apply raw-unit edits to one cluster profile and re-map it.

    Edits accumulate across runs; setting a feature back to its base value
    reverts it. The map itself is never mutated.
    """
    if not 0 <= cluster < state.n_clusters:
        raise IndexError(f"cluster index {cluster} out of range")
    profile = np.asarray(state.edited_profiles[cluster], dtype=float)
    for name, value in edits.items():
        if name not in state.feature_names:
            raise UnknownFeature(f"unknown feature {name!r}")
        value = float(value)
        if not np.isfinite(value):
            raise NonFiniteValue(f"edit for {name!r} is not finite")
        profile[state.feature_names.index(name)] = value

    hit = best_matching_unit(model, profile)
    old = state.base_bmu[cluster]
    run = ScenarioRun(
        cluster=cluster,
        edits={k: float(v) for k, v in edits.items()},
        edited_profile=tuple(float(v) for v in profile),
        old_bmu=old,
        new_bmu=hit.bmu,
        moved=hit.bmu != old,
        warnings=tuple(_range_warnings(model, profile)),
    )
    edited = list(state.edited_profiles)
    edited[cluster] = run.edited_profile
    current = list(state.current_bmu)
    current[cluster] = hit.bmu
    new_state = replace(
        state, edited_profiles=tuple(edited), current_bmu=tuple(current)
    )
    return run, new_state


def sensitivity(
    state: ScenarioState, model: SomModel, spec: SensitivitySpec
) -> SensitivityHistogram:
    """Monte Carlo BMU frequencies for one edited cluster profile.

    Deterministic for a fixed seed. Edited features missing from the
    deviation map are held exactly at their edited value (d = 0).
    """
    if not 0 <= spec.cluster < state.n_clusters:
        raise IndexError(f"cluster index {spec.cluster} out of range")
    if spec.n_samples < 1:
        raise ValueError("n_samples must be >= 1")

    base = np.asarray(state.base_profiles[spec.cluster], dtype=float)
    edited = np.asarray(state.edited_profiles[spec.cluster], dtype=float)
    edited_idx = np.flatnonzero(edited != base)
    if edited_idx.size == 0:
        raise NoEditsToPerturb(
            f"cluster {spec.cluster} has no edited features to perturb"
        )
    edited_names = [state.feature_names[j] for j in edited_idx]
    for name, d in spec.deviation.items():
        if name not in edited_names:
            raise InvalidDeviation(
                f"deviation given for {name!r}, which is not an edited feature"
            )
        if not 0.0 <= float(d) <= 1.0:
            raise InvalidDeviation(f"deviation for {name!r} must be in [0, 1]")

    d_vec = np.array([float(spec.deviation.get(n, 0.0)) for n in edited_names])
    delta = edited[edited_idx] - base[edited_idx]

    rng = np.random.default_rng(int(spec.seed) % (2**63))
    r = rng.random((spec.n_samples, edited_idx.size))
    u = -d_vec + 2.0 * d_vec * r
    profiles = np.tile(base, (spec.n_samples, 1))
    profiles[:, edited_idx] = base[edited_idx] + delta * (1.0 + u)

    scaled = apply_scaling_matrix(model.scaling, profiles)
    bmus = _assign(model.weights, scaled)
    counts: dict[int, int] = {}
    for b in bmus:
        counts[int(b)] = counts.get(int(b), 0) + 1

    lo = np.asarray(model.feature_min)[edited_idx]
    hi = np.asarray(model.feature_max)[edited_idx]
    out_of_range = int(
        ((profiles[:, edited_idx] < lo) | (profiles[:, edited_idx] > hi)).any(axis=1).sum()
    )
    notes = []
    if out_of_range:
        notes.append(
            f"{out_of_range} of {spec.n_samples} samples extrapolate beyond "
            "the training range"
        )

    return SensitivityHistogram(
        cluster=spec.cluster,
        counts=counts,
        n_samples=spec.n_samples,
        seed=spec.seed,
        deviation={k: float(v) for k, v in spec.deviation.items()},
        warnings=tuple(notes),
    )
