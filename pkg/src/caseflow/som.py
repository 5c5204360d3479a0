"""Self-organizing map: online Kohonen training, quality metrics, and the
per-quadrant analysis that backs the map visualizations.

The map is a rectangular grid of neurons ("quadrants"), each holding a
weight vector in scaled feature space. Training draws seeded-random cases
one at a time and pulls every neuron toward the drawn case, weighted by a
Gaussian neighborhood around the best matching unit; both the learning rate
and the neighborhood radius decay linearly across iterations, with the
radius floored at 0.5 so late updates stay local.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .anova import AnovaRow, anova_table
from .dataset import CaseDataset
from .errors import (
    ConfigInvalid,
    DatasetMismatch,
    DimensionMismatch,
    InsufficientGroups,
)
from .scaling import (
    ScalingParams,
    apply_scaling,
    apply_scaling_matrix,
    fit_scaling,
    invert_scaling_matrix,
)
from .validation import as_float_matrix, as_float_vector, check_fitted

MODEL_FORMAT_VERSION = 1
RADIUS_FLOOR = 0.5


@dataclass(frozen=True)
class SomConfig:
    """Training hyperparameters. ``radius`` defaults to max(rows, cols)/2;
    ``iterations`` must be at least the case count."""

    grid_rows: int = 5
    grid_cols: int = 5
    iterations: int = 1000
    learning_rate: float = 0.5
    seed: int = 0
    scale_data: bool = True
    radius: float | None = None

    def validate(self) -> None:
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise ConfigInvalid("grid dimensions must be positive")
        if self.grid_rows * self.grid_cols < 2:
            raise ConfigInvalid("grid must contain at least 2 neurons")
        if self.iterations < 1:
            raise ConfigInvalid("iterations must be positive")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ConfigInvalid("learning_rate must be in (0, 1]")
        if self.radius is not None and self.radius <= 0:
            raise ConfigInvalid("radius must be positive")

    @property
    def n_neurons(self) -> int:
        return self.grid_rows * self.grid_cols

    def effective_radius(self) -> float:
        if self.radius is not None:
            return float(self.radius)
        return max(self.grid_rows, self.grid_cols) / 2.0

    def to_dict(self) -> dict:
        return {
            "grid_rows": self.grid_rows,
            "grid_cols": self.grid_cols,
            "iterations": self.iterations,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
            "scale_data": self.scale_data,
            "radius": self.radius,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SomConfig":
        return cls(
            grid_rows=int(d["grid_rows"]),
            grid_cols=int(d["grid_cols"]),
            iterations=int(d["iterations"]),
            learning_rate=float(d["learning_rate"]),
            seed=int(d["seed"]),
            scale_data=bool(d["scale_data"]),
            radius=None if d["radius"] is None else float(d["radius"]),
        )


def grid_coordinates(rows: int, cols: int) -> np.ndarray:
    """(n_neurons, 2) row-major grid coordinates; neuron j sits at
    (j // cols, j % cols)."""
    rr, cc = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    return np.column_stack([rr.ravel(), cc.ravel()]).astype(float)


def _squared_grid_distances(rows: int, cols: int) -> np.ndarray:
    coords = grid_coordinates(rows, cols)
    diff = coords[:, None, :] - coords[None, :, :]
    return (diff**2).sum(axis=2)


def grid_adjacent(rows: int, cols: int) -> np.ndarray:
    """Boolean neighbor matrix: Chebyshev distance exactly 1 on the grid."""
    coords = grid_coordinates(rows, cols)
    diff = np.abs(coords[:, None, :] - coords[None, :, :])
    cheb = diff.max(axis=2)
    return cheb == 1.0


def _init_weights(Xs: np.ndarray, n_neurons: int, rng: np.random.Generator) -> np.ndarray:
    n = Xs.shape[0]
    if n >= n_neurons:
        idx = rng.choice(n, size=n_neurons, replace=False)
        return Xs[idx].copy()
    # more neurons than cases: cycle cases and jitter to break symmetry
    idx = np.arange(n_neurons) % n
    jitter = rng.normal(scale=1e-3, size=(n_neurons, Xs.shape[1]))
    return Xs[idx] + jitter


def _train_weights(
    Xs: np.ndarray,
    rows: int,
    cols: int,
    iterations: int,
    alpha0: float,
    sigma0: float,
    rng: np.random.Generator,
    on_step=None,
) -> np.ndarray:
    W = _init_weights(Xs, rows * cols, rng)
    G2 = _squared_grid_distances(rows, cols)
    n = Xs.shape[0]
    T = iterations
    for t in range(T):
        x = Xs[int(rng.integers(n))]
        sqd = ((W - x) ** 2).sum(axis=1)
        bmu = int(np.argmin(sqd))
        alpha = alpha0 * (1.0 - t / T)
        sigma = max(sigma0 * (1.0 - t / T), RADIUS_FLOOR)
        h = np.exp(-G2[bmu] / (2.0 * sigma * sigma))
        W += alpha * h[:, None] * (x - W)
        if on_step is not None:
            on_step(t + 1, W)
    return W


def two_nearest(weights: np.ndarray, x: np.ndarray) -> tuple[int, float, int, float]:
    """Indices and distances of the two nearest neurons; ties resolve to the
    lower row-major index, and the runner-up is always a different neuron."""
    d = np.sqrt(((weights - x) ** 2).sum(axis=1))
    best = int(np.argmin(d))
    masked = d.copy()
    masked[best] = np.inf
    second = int(np.argmin(masked))
    return best, float(d[best]), second, float(d[second])


class SelfOrganizingMap(ClusterMixin, BaseEstimator):
    """Sklearn-style estimator over plain arrays.

    ``fit(X)`` trains the grid; ``predict(X)`` returns BMU indices;
    ``transform(X)`` returns the (n, n_neurons) distance matrix. Scaling, if
    enabled, is fitted on the training data and frozen.
    """

    def __init__(
        self,
        grid_rows: int = 5,
        grid_cols: int = 5,
        iterations: int | None = None,
        learning_rate: float = 0.5,
        seed: int = 0,
        scale_data: bool = True,
        radius: float | None = None,
    ):
        self.grid_rows = grid_rows
        self.grid_cols = grid_cols
        self.iterations = iterations
        self.learning_rate = learning_rate
        self.seed = seed
        self.scale_data = scale_data
        self.radius = radius

    def _config(self, n_cases: int) -> SomConfig:
        iters = self.iterations if self.iterations is not None else 100 * n_cases
        return SomConfig(
            grid_rows=self.grid_rows,
            grid_cols=self.grid_cols,
            iterations=int(iters),
            learning_rate=self.learning_rate,
            seed=self.seed,
            scale_data=self.scale_data,
            radius=self.radius,
        )

    def fit(self, X, y=None):
        X = as_float_matrix(X)
        config = self._config(X.shape[0])
        config.validate()
        if config.iterations < X.shape[0]:
            raise ConfigInvalid(
                f"iterations ({config.iterations}) must be >= case count ({X.shape[0]})"
            )
        mean = X.mean(axis=0)
        sd = X.std(axis=0, ddof=1) if X.shape[0] > 1 else np.zeros(X.shape[1])
        self.scaling_ = ScalingParams(tuple(mean), tuple(sd), config.scale_data)
        Xs = apply_scaling_matrix(self.scaling_, X)
        rng = np.random.default_rng(
            np.random.SeedSequence(int(config.seed) % (2**63))
        )
        self.weights_ = _train_weights(
            Xs,
            config.grid_rows,
            config.grid_cols,
            config.iterations,
            config.learning_rate,
            config.effective_radius(),
            rng,
        )
        self.config_ = config
        self.labels_ = self._bmu_indices(Xs)
        self.n_features_in_ = X.shape[1]
        return self

    def _bmu_indices(self, Xs: np.ndarray) -> np.ndarray:
        diff = Xs[:, None, :] - self.weights_[None, :, :]
        sqd = np.einsum("njm,njm->nj", diff, diff)
        return np.argmin(sqd, axis=1)

    def predict(self, X):
        check_fitted(self, "weights_")
        Xs = apply_scaling_matrix(self.scaling_, as_float_matrix(X))
        return self._bmu_indices(Xs)

    def transform(self, X):
        check_fitted(self, "weights_")
        Xs = apply_scaling_matrix(self.scaling_, as_float_matrix(X))
        diff = Xs[:, None, :] - self.weights_[None, :, :]
        return np.sqrt(np.einsum("njm,njm->nj", diff, diff))


# --- trained-model record ----------------------------------------------------

@dataclass(frozen=True)
class BmuHit:
    bmu: int
    second: int
    distance: float


@dataclass(frozen=True)
class SomModel:
    """Trained map plus everything needed to reuse it later: the frozen
    scaling, per-case assignments, quality metrics, and per-feature ANOVA."""

    config: SomConfig
    scaling: ScalingParams
    weights: np.ndarray = field(repr=False)
    case_ids: tuple[str, ...]
    feature_names: tuple[str, ...]
    assignments: tuple[int, ...]
    quantization_error: float
    topographic_error: float
    anova: tuple[AnovaRow, ...]
    feature_min: tuple[float, ...]
    feature_max: tuple[float, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if w.shape != (self.config.n_neurons, len(self.feature_names)):
            raise DimensionMismatch(
                f"weights shape {w.shape} does not match grid/features"
            )

    @property
    def n_neurons(self) -> int:
        return self.config.n_neurons

    def neuron_coords(self, index: int) -> tuple[int, int]:
        return index // self.config.grid_cols, index % self.config.grid_cols

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "config": self.config.to_dict(),
            "scaling": self.scaling.to_dict(),
            "weights": [[float(v) for v in row] for row in self.weights],
            "case_ids": list(self.case_ids),
            "feature_names": list(self.feature_names),
            "assignments": list(self.assignments),
            "quantization_error": self.quantization_error,
            "topographic_error": self.topographic_error,
            "anova": [row.to_dict() for row in self.anova],
            "feature_min": list(self.feature_min),
            "feature_max": list(self.feature_max),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SomModel":
        version = d.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version: {version}")
        return cls(
            config=SomConfig.from_dict(d["config"]),
            scaling=ScalingParams.from_dict(d["scaling"]),
            weights=np.asarray(d["weights"], dtype=float),
            case_ids=tuple(d["case_ids"]),
            feature_names=tuple(d["feature_names"]),
            assignments=tuple(int(a) for a in d["assignments"]),
            quantization_error=float(d["quantization_error"]),
            topographic_error=float(d["topographic_error"]),
            anova=tuple(AnovaRow.from_dict(r) for r in d["anova"]),
            feature_min=tuple(float(v) for v in d["feature_min"]),
            feature_max=tuple(float(v) for v in d["feature_max"]),
            warnings=tuple(d.get("warnings", [])),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "SomModel":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SomModel):
            return NotImplemented
        return self.to_dict() == other.to_dict()


# --- domain operations --------------------------------------------------------

def train_som(data: CaseDataset, config: SomConfig) -> SomModel:
    """Train a map on a dataset. Deterministic for a fixed config seed."""
    config.validate()
    if data.n_cases < 1:
        raise DimensionMismatch("dataset is empty")
    if config.iterations < data.n_cases:
        raise ConfigInvalid(
            f"iterations ({config.iterations}) must be >= case count ({data.n_cases})"
        )

    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        scaling = fit_scaling(data, enabled=config.scale_data)
    notes.extend(str(w.message) for w in caught)

    Xs = apply_scaling_matrix(scaling, data.values)
    rng = np.random.default_rng(np.random.SeedSequence(int(config.seed) % (2**63)))
    weights = _train_weights(
        Xs,
        config.grid_rows,
        config.grid_cols,
        config.iterations,
        config.learning_rate,
        config.effective_radius(),
        rng,
    )

    assignments = _assign(weights, Xs)
    qe = _quantization_error(weights, Xs, assignments)
    te = _topographic_error(weights, Xs, config.grid_rows, config.grid_cols)

    try:
        rows = tuple(anova_table(data.values, assignments, data.feature_names))
    except InsufficientGroups as exc:
        rows = ()
        notes.append(f"ANOVA unavailable: {exc}")

    empty = sorted(set(range(config.n_neurons)) - set(int(a) for a in assignments))
    if empty:
        notes.append(f"empty quadrants (no assigned cases): {empty}")

    return SomModel(
        config=config,
        scaling=scaling,
        weights=weights,
        case_ids=data.case_ids,
        feature_names=data.feature_names,
        assignments=tuple(int(a) for a in assignments),
        quantization_error=qe,
        topographic_error=te,
        anova=rows,
        feature_min=tuple(float(v) for v in data.values.min(axis=0)),
        feature_max=tuple(float(v) for v in data.values.max(axis=0)),
        warnings=tuple(notes),
    )


def _assign(weights: np.ndarray, Xs: np.ndarray) -> np.ndarray:
    diff = Xs[:, None, :] - weights[None, :, :]
    sqd = np.einsum("njm,njm->nj", diff, diff)
    return np.argmin(sqd, axis=1)


def _quantization_error(weights, Xs, assignments) -> float:
    d = np.sqrt(((Xs - weights[assignments]) ** 2).sum(axis=1))
    return float(d.mean())


def _topographic_error(weights, Xs, rows: int, cols: int) -> float:
    adjacent = grid_adjacent(rows, cols)
    bad = 0
    for x in Xs:
        b, _, s, _ = two_nearest(weights, x)
        if not adjacent[b, s]:
            bad += 1
    return bad / Xs.shape[0]


def best_matching_unit(model: SomModel, raw_row) -> BmuHit:
    """Two nearest quadrants for one raw-unit profile (scaling applied
    internally; distances reported in scaled space)."""
    vec = as_float_vector(raw_row, length=len(model.feature_names))
    x = apply_scaling(model.scaling, vec)
    b, db, s, _ = two_nearest(model.weights, x)
    return BmuHit(bmu=b, second=s, distance=db)


def quantization_error(model: SomModel, data: CaseDataset) -> float:
    """Mean scaled-space distance from each case to its BMU."""
    _check_schema(model, data)
    Xs = apply_scaling_matrix(model.scaling, data.values)
    assignments = _assign(model.weights, Xs)
    return _quantization_error(model.weights, Xs, assignments)


def topographic_error(model: SomModel, data: CaseDataset) -> float:
    """Fraction of cases whose two nearest neurons are not grid-adjacent
    (adjacency = Chebyshev distance 1)."""
    _check_schema(model, data)
    Xs = apply_scaling_matrix(model.scaling, data.values)
    return _topographic_error(
        model.weights, Xs, model.config.grid_rows, model.config.grid_cols
    )


def anova_by_neuron(model: SomModel, data: CaseDataset) -> tuple[AnovaRow, ...]:
    """Per-feature one-way ANOVA with the nonempty quadrants as groups."""
    _check_schema(model, data)
    return tuple(anova_table(data.values, np.asarray(model.assignments), data.feature_names))


def _check_schema(model: SomModel, data: CaseDataset) -> None:
    if tuple(data.feature_names) != tuple(model.feature_names):
        from .errors import SchemaMismatch

        missing = [f for f in model.feature_names if f not in data.feature_names]
        extra = [f for f in data.feature_names if f not in model.feature_names]
        raise SchemaMismatch(missing, extra)


@dataclass(frozen=True)
class QuadrantProfile:
    """One quadrant's raw-unit weight profile for the grid bar-plot: bars are
    deviations from the global feature means, so an on-mean feature draws as
    a flat line."""

    neuron: int
    row: int
    col: int
    weights_raw: tuple[float, ...]
    deviation: tuple[float, ...]
    case_count: int
    empty: bool

    def to_dict(self) -> dict:
        return {
            "neuron": self.neuron,
            "row": self.row,
            "col": self.col,
            "weights_raw": list(self.weights_raw),
            "deviation": list(self.deviation),
            "case_count": self.case_count,
            "empty": self.empty,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuadrantProfile":
        return cls(
            neuron=int(d["neuron"]),
            row=int(d["row"]),
            col=int(d["col"]),
            weights_raw=tuple(float(v) for v in d["weights_raw"]),
            deviation=tuple(float(v) for v in d["deviation"]),
            case_count=int(d["case_count"]),
            empty=bool(d["empty"]),
        )


def quadrant_profiles(model: SomModel) -> list[QuadrantProfile]:
    """Raw-unit neuron profiles plus their deviation from the global mean."""
    raw = invert_scaling_matrix(model.scaling, model.weights)
    global_mean = np.asarray(model.scaling.mean)
    counts = np.bincount(np.asarray(model.assignments), minlength=model.n_neurons)
    out = []
    for j in range(model.n_neurons):
        r, c = model.neuron_coords(j)
        out.append(
            QuadrantProfile(
                neuron=j,
                row=r,
                col=c,
                weights_raw=tuple(float(v) for v in raw[j]),
                deviation=tuple(float(v) for v in raw[j] - global_mean),
                case_count=int(counts[j]),
                empty=bool(counts[j] == 0),
            )
        )
    return out


def names_plot_data(model: SomModel, kmeans_result) -> list[list[str]]:
    """Per-neuron "{cluster}-{case}" labels: every case appears once, in the
    cell of its BMU."""
    if len(kmeans_result.assignments) != len(model.assignments):
        raise DatasetMismatch(
            "clustering and map were not computed on the same dataset"
        )
    cells: list[list[str]] = [[] for _ in range(model.n_neurons)]
    for case_id, cluster, neuron in zip(
        model.case_ids, kmeans_result.assignments, model.assignments
    ):
        cells[neuron].append(f"{cluster}-{case_id}")
    return cells
