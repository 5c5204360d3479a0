import numpy as np
import pytest

from caseflow.dataset import CaseDataset
from caseflow.kmeans import run_kmeans
from caseflow.som import SomConfig, train_som


@pytest.fixture
def four_point_dataset():
    """Two tight pairs 10 apart: the hand-checkable clustering fixture."""
    return CaseDataset(
        case_ids=("1", "2", "3", "4"),
        feature_names=("x", "y"),
        values=np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]]),
    )


def make_clouds(n_per_cloud: int = 10, seed: int = 0) -> CaseDataset:
    rng = np.random.default_rng(seed)
    a = rng.normal((0.0, 0.0), 0.3, (n_per_cloud, 2))
    b = rng.normal((10.0, 10.0), 0.3, (n_per_cloud, 2))
    values = np.vstack([a, b])
    return CaseDataset(
        case_ids=tuple(str(i + 1) for i in range(2 * n_per_cloud)),
        feature_names=("f1", "f2"),
        values=values,
    )


@pytest.fixture(scope="session")
def clouds_dataset():
    return make_clouds()


@pytest.fixture(scope="session")
def clouds_som(clouds_dataset):
    """1x2 map trained on the separated clouds; each cloud owns a neuron."""
    return train_som(
        clouds_dataset,
        SomConfig(grid_rows=1, grid_cols=2, iterations=2000, seed=3),
    )


@pytest.fixture(scope="session")
def clouds_kmeans(clouds_dataset):
    return run_kmeans(clouds_dataset, k=2, seed=1, n_init=5)


def random_dataset(rng: np.random.Generator, n: int, m: int) -> CaseDataset:
    return CaseDataset(
        case_ids=tuple(str(i + 1) for i in range(n)),
        feature_names=tuple(f"v{j + 1}" for j in range(m)),
        values=rng.normal(0, 2.0, (n, m)),
    )
