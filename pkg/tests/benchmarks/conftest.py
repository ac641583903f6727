"""Fixtures for benchmark tests."""

from typing import Callable

import numpy as np
import pytest

from tcp_homotopy.model import TcpProblem
from tcp_homotopy.tensor import DenseTensor


def generate_problem(order: int, dim: int, seed: int = 0) -> TcpProblem:
    """Generate a random problem with a strongly positive diagonal.

    Args:
        order: Tensor order m.
        dim: Dimension n.
        seed: Random seed.

    Returns:
        Problem whose tensor is a diagonal of ones plus small noise, so the
        homotopy path stays bounded.
    """
    rng = np.random.default_rng(seed)
    cube = 0.01 * rng.standard_normal((dim,) * order)
    for i in range(dim):
        cube[(i,) * order] += 1.0
    q = rng.uniform(-2.0, 2.0, size=dim)
    return TcpProblem(DenseTensor(order, dim, cube), q)


@pytest.fixture
def problem_factory() -> Callable[[int, int], TcpProblem]:
    """Factory fixture for random problems of a given order and dimension."""
    return generate_problem
