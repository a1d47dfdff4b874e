from __future__ import annotations

import numpy as np
import pytest

from remote_div import PointSet
from remote_div.rng import stream_rng


def random_euclidean(seed: int, n: int, dim: int = 2, scale: float = 1.0) -> PointSet:
    rng = stream_rng(seed, 0)
    return PointSet.from_coords(rng.random((n, dim)) * scale)


def random_matrix_metric(seed: int, n: int) -> PointSet:
    """A validated matrix-kind metric (distances of random planar points)."""
    rng = stream_rng(seed, 0)
    coords = rng.random((n, 2))
    diff = coords[:, None, :] - coords[None, :, :]
    dmat = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(dmat, 0.0)
    return PointSet.from_matrix(dmat)


def line_pointset(values) -> PointSet:
    return PointSet.from_coords(np.asarray(values, dtype=np.float64).reshape(-1, 1))


def two_clusters(seed: int, n: int, separation: float = 100.0, width: float = 1.0) -> PointSet:
    rng = stream_rng(seed, 0)
    coords = rng.random((n, 2)) * width
    coords[n // 2 :, 0] += separation
    return PointSet.from_coords(coords)


@pytest.fixture
def line3() -> PointSet:
    return line_pointset([0.0, 1.0, 10.0])
