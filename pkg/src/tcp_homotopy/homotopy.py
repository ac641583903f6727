"""Homotopy map H(x, y, t) and its partial derivatives.

    H(x, y, t) = [ x * y - t a                          ]
                 [ y - (1 - t)(A x^(m-1) + q) - t b     ]

At t = 1 the zero is (a / b, b); at t = 0 the zero set is the solution set
of the reformulated complementarity problem.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from tcp_homotopy.exceptions import ParameterError, ShapeError
from tcp_homotopy.model import TcpProblem
from tcp_homotopy.tensor import FloatArray, jacobian_of_map

PERTURB_LOW = 0.9
PERTURB_HIGH = 1.1


@dataclass(frozen=True, eq=False)
class HomotopyParams:
    """Vectors a and b of the homotopy.

    Attributes:
        a: Positive vector (nonnegative in relaxed mode).
        b: Positive vector.
        relaxed: Allow zero entries in ``a``. Experimental: the traced path
            is only guaranteed smooth for strictly positive ``a``.
    """

    a: FloatArray
    b: FloatArray
    relaxed: bool = False

    def __post_init__(self) -> None:
        a = np.array(self.a, dtype=np.float64).reshape(-1)
        b = np.array(self.b, dtype=np.float64).reshape(-1)
        if a.shape != b.shape:
            raise ShapeError(f"a has length {a.size} but b has length {b.size}")
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise ParameterError("a and b must be finite")
        if np.any(b <= 0):
            raise ParameterError("b must be strictly positive")
        if self.relaxed:
            if np.any(a < 0):
                raise ParameterError("a must be nonnegative")
        elif np.any(a <= 0):
            raise ParameterError(
                "a must be strictly positive (use relaxed mode for a >= 0)"
            )
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def uniform(
        cls, dim: int, a: float = 1.0, b: float = 1.0, relaxed: bool = False
    ) -> "HomotopyParams":
        """Constant vectors, e.g. a = b = [1, ..., 1]."""
        return cls(np.full(dim, a), np.full(dim, b), relaxed)

    @property
    def dim(self) -> int:
        """Length of a and b."""
        return int(self.a.size)

    def perturbed(self, seed: int) -> "HomotopyParams":
        """Copy with b scaled entrywise by uniform factors in [0.9, 1.1]."""
        rng = np.random.default_rng(seed)
        factors = rng.uniform(PERTURB_LOW, PERTURB_HIGH, size=self.dim)
        return HomotopyParams(self.a, self.b * factors, self.relaxed)


@dataclass(frozen=True, eq=False)
class HomotopyPoint:
    """Point (x, y, t) on or near the homotopy path."""

    x: FloatArray
    y: FloatArray
    t: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.t <= 1.0:
            raise ParameterError(f"t must lie in [0, 1], got {self.t}")
        object.__setattr__(self, "x", np.asarray(self.x, dtype=np.float64))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=np.float64))

    @classmethod
    def from_z(cls, z: ArrayLike, t: float) -> "HomotopyPoint":
        """Split a stacked 2n-vector ``z = (x, y)``."""
        arr = np.asarray(z, dtype=np.float64)
        n = arr.size // 2
        return cls(arr[:n].copy(), arr[n:].copy(), float(t))

    @property
    def z(self) -> FloatArray:
        """Stacked 2n-vector (x, y)."""
        return np.concatenate([self.x, self.y])


def _check_shapes(problem: TcpProblem, pt: HomotopyPoint) -> None:
    n = problem.dim
    if pt.x.shape != (n,) or pt.y.shape != (n,):
        raise ShapeError(
            f"Point has shapes {pt.x.shape}/{pt.y.shape}, problem dimension is {n}"
        )


def check_dimensions(problem: TcpProblem, params: HomotopyParams) -> None:
    """Raise ShapeError unless a and b match the problem dimension."""
    if params.dim != problem.dim:
        raise ShapeError(
            f"Homotopy vectors have length {params.dim}, "
            f"problem dimension is {problem.dim}"
        )


def start_point(params: HomotopyParams) -> HomotopyPoint:
    """Known zero of H at t = 1: ``x0 = a / b``, ``y0 = b``."""
    return HomotopyPoint(params.a / params.b, params.b.copy(), 1.0)


def evaluate_h(
    problem: TcpProblem, params: HomotopyParams, pt: HomotopyPoint
) -> FloatArray:
    """Evaluate the 2n-vector H(x, y, t).

    Raises:
        ShapeError: If point or parameters do not match the problem.
    """
    _check_shapes(problem, pt)
    check_dimensions(problem, params)
    t = pt.t
    return np.concatenate(
        [
            pt.x * pt.y - t * params.a,
            pt.y - (1.0 - t) * problem.mapping(pt.x) - t * params.b,
        ]
    )


def jacobian_z(problem: TcpProblem, pt: HomotopyPoint) -> FloatArray:
    """Partial derivative of H in z = (x, y).

    Block form ``[[diag(y), diag(x)], [-(1 - t)(m - 1) Ahat x^(m-2), I]]``.

    Raises:
        ShapeError: If the point does not match the problem.
    """
    _check_shapes(problem, pt)
    n = problem.dim
    lower_left = -(1.0 - pt.t) * jacobian_of_map(problem.tensor, pt.x)
    return np.block(
        [
            [np.diag(pt.y), np.diag(pt.x)],
            [lower_left, np.eye(n)],
        ]
    )


def jacobian_t(
    problem: TcpProblem, params: HomotopyParams, pt: HomotopyPoint
) -> FloatArray:
    """Partial derivative of H in t: ``[-a ; A x^(m-1) + q - b]``.

    Raises:
        ShapeError: If point or parameters do not match the problem.
    """
    _check_shapes(problem, pt)
    check_dimensions(problem, params)
    return np.concatenate([-params.a, problem.mapping(pt.x) - params.b])
