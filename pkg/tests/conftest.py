import numpy as np
import pytest

from islandea import TspInstance, Tour


def circle_instance(k: int, radius: float = 1000.0, name: str = "ring") -> TspInstance:
    """k cities on a circle; the hull-order tour is the unique optimum.

    With this radius the true-length gap between the hull tour and any other
    tour (>= ~2 edge lengths) dwarfs the worst-case rounding shift (<= k/2 per
    tour), so the hull tour stays optimal under integer TSPLIB weights.
    """
    ang = 2.0 * np.pi * np.arange(k) / k
    coords = np.stack([radius * np.cos(ang) + 2 * radius,
                       radius * np.sin(ang) + 2 * radius], axis=1)
    return TspInstance(name=f"{name}{k}", dimension=k, metric="EUC_2D",
                       coords=coords)


def grid_instance(rows: int, cols: int, spacing: float = 100.0) -> TspInstance:
    xs, ys = np.meshgrid(np.arange(cols) * spacing, np.arange(rows) * spacing)
    coords = np.stack([xs.ravel(), ys.ravel()], axis=1).astype(float)
    return TspInstance(name=f"grid{rows}x{cols}", dimension=rows * cols,
                       metric="EUC_2D", coords=coords)


def brute_force_cycle_length(order, inst) -> int:
    """Independent length oracle: explicit edge-by-edge sum."""
    total = 0
    k = len(order)
    for p in range(k):
        total += inst.edge_weight(int(order[p]), int(order[(p + 1) % k]))
    return total


def connection_matrix(tour: Tour) -> np.ndarray:
    """Explicit k x k 0/1 matrix: entry (l, m) = 1 iff m follows l."""
    k = tour.dimension
    m = np.zeros((k, k), dtype=np.int8)
    order = tour.order
    for p in range(k):
        m[order[p], order[(p + 1) % k]] = 1
    return m


def assert_valid_permutation(order, k):
    seen = np.zeros(k, dtype=bool)
    assert len(order) == k
    for c in order:
        assert 0 <= c < k
        assert not seen[c], f"city {c} repeated"
        seen[c] = True


@pytest.fixture
def tiny_instance() -> TspInstance:
    """3 cities at (0,0), (0,1), (1,0): cycle length 1 + nint(sqrt(2)) + 1 = 3."""
    coords = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    return TspInstance(name="tiny3", dimension=3, metric="EUC_2D", coords=coords)


@pytest.fixture
def square_instance() -> TspInstance:
    coords = np.array([[0.0, 0.0], [0.0, 100.0], [100.0, 100.0], [100.0, 0.0]])
    return TspInstance(name="square4", dimension=4, metric="EUC_2D", coords=coords)


@pytest.fixture
def ring12() -> TspInstance:
    return circle_instance(12)


@pytest.fixture
def ring52() -> TspInstance:
    return circle_instance(52)
