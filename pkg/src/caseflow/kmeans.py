"""K-means clustering of cases with pseudo-F and silhouette quality metrics.

Lloyd's algorithm with k-means++ seeding, restarted ``n_init`` times from
deterministic per-restart streams; the restart with the lowest within-cluster
scatter wins (ties go to the lower restart index). Clusters are guaranteed
nonempty: an empty cluster steals the point currently farthest from its own
centroid.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from ._json import decode_float, encode_float
from .dataset import CaseDataset
from .errors import KTooLarge, UndefinedMetric
from .scaling import apply_scaling_matrix, fit_scaling
from .validation import as_float_matrix, check_fitted


class DegenerateDataWarning(UserWarning):
    """Fewer distinct rows than requested clusters."""


def _seeded_rng(seed: int, restart: int) -> np.random.Generator:
    entropy = int(seed) % (2**63)
    return np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=(restart,)))


def _sq_distances(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # (n, k) squared Euclidean distances
    diff = X[:, None, :] - centers[None, :, :]
    return np.einsum("nkm,nkm->nk", diff, diff)


def _kmeanspp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    first = int(rng.integers(n))
    centers[0] = X[first]
    closest = ((X - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            probs = closest / total
            idx = int(rng.choice(n, p=probs))
        else:
            # all remaining distances zero (duplicate-heavy data)
            idx = int(rng.integers(n))
        centers[c] = X[idx]
        closest = np.minimum(closest, ((X - centers[c]) ** 2).sum(axis=1))
    return centers


def _repair_empty(labels: np.ndarray, sqd: np.ndarray, k: int) -> np.ndarray:
    """Assign the farthest-from-centroid point to each empty cluster."""
    labels = labels.copy()
    sizes = np.bincount(labels, minlength=k)
    for empty in np.flatnonzero(sizes == 0):
        own = sqd[np.arange(labels.size), labels]
        donatable = sizes[labels] > 1
        if not donatable.any():
            continue
        masked = np.where(donatable, own, -np.inf)
        mover = int(np.argmax(masked))  # argmax takes the lowest index on ties
        sizes[labels[mover]] -= 1
        labels[mover] = empty
        sizes[empty] += 1
    return labels


def _lloyd(
    X: np.ndarray, k: int, rng: np.random.Generator, max_iter: int
) -> tuple[np.ndarray, np.ndarray, float, list[float], int]:
    """One seeded k-means run. Returns (centers, labels, wss, wss_history, iters)."""
    centers = _kmeanspp_init(X, k, rng)
    labels = np.full(X.shape[0], -1, dtype=int)
    history: list[float] = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        sqd = _sq_distances(X, centers)
        new_labels = np.argmin(sqd, axis=1)  # equidistant -> lowest index
        new_labels = _repair_empty(new_labels, sqd, k)
        for c in range(k):
            centers[c] = X[new_labels == c].mean(axis=0)
        sqd = _sq_distances(X, centers)
        wss = float(sqd[np.arange(X.shape[0]), new_labels].sum())
        history.append(wss)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return centers, labels, history[-1], history, n_iter


class CaseKMeans(ClusterMixin, BaseEstimator):
    """Best-of-restarts k-means estimator.

    Parameters
    ----------
    n_clusters : int
    seed : int
        Root seed; restart ``r`` derives its own stream from ``(seed, r)``.
    n_init : int
        Number of k-means++ restarts.
    max_iter : int
        Lloyd iteration cap per restart.

    Attributes (after ``fit``)
    --------------------------
    cluster_centers_, labels_, inertia_ : best restart's solution.
    restart_wss_ : final scatter of every restart, by restart index.
    wss_histories_ : per-iteration scatter trace of every restart.
    """

    def __init__(self, n_clusters: int = 3, seed: int = 0, n_init: int = 10,
                 max_iter: int = 100):
        self.n_clusters = n_clusters
        self.seed = seed
        self.n_init = n_init
        self.max_iter = max_iter

    def fit(self, X, y=None):
        X = as_float_matrix(X)
        n = X.shape[0]
        k = int(self.n_clusters)
        if k < 1:
            raise ValueError("n_clusters must be >= 1")
        if k > n:
            raise KTooLarge(f"k={k} exceeds case count n={n}")
        if self.n_init < 1 or self.max_iter < 1:
            raise ValueError("n_init and max_iter must be >= 1")

        n_distinct = np.unique(X, axis=0).shape[0]
        self.degenerate_ = n_distinct < k
        if self.degenerate_:
            warnings.warn(
                f"only {n_distinct} distinct rows for k={k}; duplicate rows "
                "will split across clusters",
                DegenerateDataWarning,
                stacklevel=2,
            )

        best = None
        self.restart_wss_ = []
        self.wss_histories_ = []
        for r in range(int(self.n_init)):
            rng = _seeded_rng(self.seed, r)
            centers, labels, wss, history, n_iter = _lloyd(X, k, rng, int(self.max_iter))
            self.restart_wss_.append(wss)
            self.wss_histories_.append(history)
            if best is None or wss < best[2]:
                best = (centers, labels, wss, n_iter)

        self.cluster_centers_, self.labels_, self.inertia_, self.n_iter_ = best
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_fitted(self, "cluster_centers_")
        X = as_float_matrix(X)
        return np.argmin(_sq_distances(X, self.cluster_centers_), axis=1)


# --- quality metrics --------------------------------------------------------

def pairwise_distances(X: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt(np.einsum("ijm,ijm->ij", diff, diff))


def silhouette_values(X: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-case silhouette s(i) = (b-a)/max(a,b); singletons score 0."""
    labels = np.asarray(labels)
    cluster_ids = np.unique(labels)
    if cluster_ids.size < 2:
        raise UndefinedMetric("silhouette requires k >= 2")
    dist = pairwise_distances(np.asarray(X, dtype=float))
    n = dist.shape[0]
    s = np.zeros(n)
    members = {c: np.flatnonzero(labels == c) for c in cluster_ids}
    for i in range(n):
        own = members[labels[i]]
        if own.size == 1:
            s[i] = 0.0
            continue
        a = dist[i, own].sum() / (own.size - 1)
        b = min(
            dist[i, members[c]].mean() for c in cluster_ids if c != labels[i]
        )
        denom = max(a, b)
        s[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return s


def calinski_harabasz(X: np.ndarray, labels: np.ndarray) -> float:
    """Pseudo-F: (SSB/(k-1)) / (SSW/(n-k)), higher is better."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    cluster_ids = np.unique(labels)
    k, n = cluster_ids.size, X.shape[0]
    if k < 2 or k >= n:
        raise UndefinedMetric("pseudo-F requires 2 <= k < n")
    grand = X.mean(axis=0)
    ssb = 0.0
    ssw = 0.0
    for c in cluster_ids:
        member = X[labels == c]
        center = member.mean(axis=0)
        ssb += member.shape[0] * float(((center - grand) ** 2).sum())
        ssw += float(((member - center) ** 2).sum())
    if ssw == 0.0:
        return float("inf")
    return (ssb / (k - 1)) / (ssw / (n - k))


# --- domain result -----------------------------------------------------------

@dataclass(frozen=True)
class KMeansResult:
    """Frozen clustering outcome in raw feature units.

    ``pseudo_f`` and the silhouette fields are ``None`` whenever the metric
    is undefined (k=1 for both, additionally k=n for pseudo-F).
    """

    k: int
    centroids: tuple[tuple[float, ...], ...]
    assignments: tuple[int, ...]
    cluster_sizes: tuple[int, ...]
    wss: float
    pseudo_f: float | None
    silhouette: tuple[float, ...] | None
    silhouette_cluster_means: tuple[float, ...] | None
    silhouette_overall: float | None
    seed: int
    n_init: int
    scale_data: bool
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "centroids": [list(c) for c in self.centroids],
            "assignments": list(self.assignments),
            "cluster_sizes": list(self.cluster_sizes),
            "wss": self.wss,
            "pseudo_f": encode_float(self.pseudo_f),
            "silhouette": None if self.silhouette is None else list(self.silhouette),
            "silhouette_cluster_means": (
                None if self.silhouette_cluster_means is None
                else list(self.silhouette_cluster_means)
            ),
            "silhouette_overall": self.silhouette_overall,
            "seed": self.seed,
            "n_init": self.n_init,
            "scale_data": self.scale_data,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KMeansResult":
        return cls(
            k=int(d["k"]),
            centroids=tuple(tuple(float(v) for v in c) for c in d["centroids"]),
            assignments=tuple(int(a) for a in d["assignments"]),
            cluster_sizes=tuple(int(s) for s in d["cluster_sizes"]),
            wss=float(d["wss"]),
            pseudo_f=decode_float(d["pseudo_f"]),
            silhouette=(
                None if d["silhouette"] is None
                else tuple(float(v) for v in d["silhouette"])
            ),
            silhouette_cluster_means=(
                None if d["silhouette_cluster_means"] is None
                else tuple(float(v) for v in d["silhouette_cluster_means"])
            ),
            silhouette_overall=(
                None if d["silhouette_overall"] is None
                else float(d["silhouette_overall"])
            ),
            seed=int(d["seed"]),
            n_init=int(d["n_init"]),
            scale_data=bool(d["scale_data"]),
            warnings=tuple(d.get("warnings", [])),
        )


def _metric_matrix(data: CaseDataset, scale_data: bool) -> np.ndarray:
    if not scale_data:
        return data.values
    return apply_scaling_matrix(fit_scaling(data, enabled=True), data.values)


def run_kmeans(
    data: CaseDataset,
    k: int,
    seed: int = 0,
    n_init: int = 10,
    max_iter: int = 100,
    scale_data: bool = False,
) -> KMeansResult:
    """Cluster a dataset into ``k`` groups and score the solution.

    Deterministic for fixed (data, k, seed, n_init, max_iter). With
    ``scale_data`` the clustering and its metrics run in z-scored space;
    reported centroids are always per-cluster raw-unit means.
    """
    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        metric_X = _metric_matrix(data, scale_data)
        est = CaseKMeans(n_clusters=k, seed=seed, n_init=n_init, max_iter=max_iter)
        est.fit(metric_X)
    for w in caught:
        notes.append(str(w.message))
        warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)

    labels = est.labels_
    sizes = np.bincount(labels, minlength=k)
    raw_centroids = np.vstack([data.values[labels == c].mean(axis=0) for c in range(k)])

    pseudo = None
    if 2 <= k < data.n_cases:
        pseudo = calinski_harabasz(metric_X, labels)
    sil = sil_means = sil_overall = None
    if k >= 2:
        s = silhouette_values(metric_X, labels)
        sil = tuple(float(v) for v in s)
        sil_means = tuple(float(s[labels == c].mean()) for c in range(k))
        sil_overall = float(s.mean())

    return KMeansResult(
        k=k,
        centroids=tuple(tuple(float(v) for v in row) for row in raw_centroids),
        assignments=tuple(int(v) for v in labels),
        cluster_sizes=tuple(int(v) for v in sizes),
        wss=float(est.inertia_),
        pseudo_f=pseudo,
        silhouette=sil,
        silhouette_cluster_means=sil_means,
        silhouette_overall=sil_overall,
        seed=seed,
        n_init=n_init,
        scale_data=scale_data,
        warnings=tuple(notes),
    )


def pseudo_f(result: KMeansResult, data: CaseDataset) -> float:
    """Recompute the pseudo-F statistic from stored assignments."""
    labels = np.asarray(result.assignments)
    return calinski_harabasz(_metric_matrix(data, result.scale_data), labels)


def silhouette(
    result: KMeansResult, data: CaseDataset
) -> tuple[tuple[float, ...], tuple[float, ...], float]:
    """Recompute (per-case values, per-cluster means, overall mean)."""
    labels = np.asarray(result.assignments)
    s = silhouette_values(_metric_matrix(data, result.scale_data), labels)
    per_cluster = tuple(float(s[labels == c].mean()) for c in range(result.k))
    return tuple(float(v) for v in s), per_cluster, float(s.mean())
