import numpy as np
import pytest

from pwvem import WaveContext, equispaced_directions, make_structured_triangular, make_voronoi


@pytest.fixture(scope="session")
def ctx13():
    return WaveContext(20.0, equispaced_directions(13))


@pytest.fixture(scope="session")
def tri2():
    return make_structured_triangular(2)


@pytest.fixture(scope="session")
def tri4():
    return make_structured_triangular(4)


@pytest.fixture(scope="session")
def voronoi16():
    return make_voronoi(16, seed=1, lloyd_iters=10)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20250810)


def nonconvex_cell(scale: float = 1.0) -> np.ndarray:
    """An L-shaped hexagon, CCW, not star-shaped from its centroid."""
    return scale * np.array(
        [[0.0, 0.0], [1.0, 0.0], [1.0, 0.45], [0.35, 0.45], [0.35, 1.0], [0.0, 1.0]]
    )
