import numpy as np
import pytest

from hyperblocks import load_wbc, merge_pure, normalize
from hyperblocks.dataset import Dataset, NormalizedDataset


@pytest.fixture(scope="session")
def wbc() -> Dataset:
    return load_wbc()


@pytest.fixture(scope="session")
def wbc_norm(wbc) -> NormalizedDataset:
    return normalize(wbc)


@pytest.fixture(scope="session")
def wbc_pure_blocks(wbc_norm):
    return merge_pure(wbc_norm)


def make_dataset(values, labels, names=None) -> NormalizedDataset:
    """Small already-normalized dataset for hand-built cases."""
    values = np.asarray(values, dtype=float)
    labels = list(labels)
    names = list(names) if names else [f"X{i + 1}" for i in range(values.shape[1])]
    class_labels = sorted(set(labels))
    return NormalizedDataset(coordinate_names=names,
                             ids=np.arange(len(labels)),
                             values=values, labels=labels,
                             class_labels=class_labels,
                             raw_min=np.zeros(values.shape[1]),
                             raw_max=np.ones(values.shape[1]))


def random_dataset(rng: np.random.Generator, max_points=30, max_dims=4,
                   n_classes=2, grid=None) -> NormalizedDataset:
    """Random normalized dataset within the property-suite size budget."""
    n = int(rng.integers(2, max_points + 1))
    dims = int(rng.integers(1, max_dims + 1))
    if grid:
        values = rng.integers(0, grid, size=(n, dims)) / max(grid - 1, 1)
    else:
        values = rng.random((n, dims))
    labels = [f"c{int(i)}" for i in rng.integers(0, n_classes, size=n)]
    return make_dataset(values, labels)
