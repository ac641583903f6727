"""Tensor complementarity problems and candidate-solution checks."""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from tcp_homotopy.exceptions import ParameterError, ShapeError
from tcp_homotopy.tensor import DenseTensor, FloatArray, contract_to_vector


def _frozen_vector(values: ArrayLike, dim: int, name: str) -> FloatArray:
    vec = np.array(values, dtype=np.float64).reshape(-1)
    if vec.shape != (dim,):
        raise ShapeError(f"{name} must have length {dim}, got {vec.size}")
    vec.flags.writeable = False
    return vec


@dataclass(frozen=True, eq=False)
class TcpProblem:
    """TCP(A, q): find x >= 0 with A x^(m-1) + q >= 0 and <x, A x^(m-1) + q> = 0."""

    tensor: DenseTensor
    q: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", _frozen_vector(self.q, self.tensor.dim, "q"))

    @property
    def dim(self) -> int:
        """Problem dimension n."""
        return self.tensor.dim

    @property
    def order(self) -> int:
        """Tensor order m."""
        return self.tensor.order

    def mapping(self, x: ArrayLike) -> FloatArray:
        """Evaluate ``A x^(m-1) + q``."""
        return contract_to_vector(self.tensor, x) + self.q

    def with_q(self, q: ArrayLike) -> "TcpProblem":
        """Same tensor, different shift vector."""
        return TcpProblem(self.tensor, np.asarray(q, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class CandidatePair:
    """A candidate (x, y) for the reformulated problem."""

    x: FloatArray
    y: FloatArray

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "x", _frozen_vector(x, x.size, "x"))
        object.__setattr__(self, "y", _frozen_vector(self.y, x.size, "y"))

    @classmethod
    def from_x(cls, problem: TcpProblem, x: ArrayLike) -> "CandidatePair":
        """Pair ``x`` with ``y = A x^(m-1) + q``."""
        return cls(np.asarray(x, dtype=np.float64), problem.mapping(x))


def _check_pair(problem: TcpProblem, pair: CandidatePair) -> None:
    if pair.x.size != problem.dim:
        raise ShapeError(
            f"Candidate has dimension {pair.x.size}, problem has {problem.dim}"
        )


def reformulation_residual_vector(
    problem: TcpProblem, pair: CandidatePair
) -> FloatArray:
    """Stack ``[x * y ; y - (A x^(m-1) + q)]``.

    Raises:
        ShapeError: If the pair does not match the problem dimension.
    """
    _check_pair(problem, pair)
    return np.concatenate([pair.x * pair.y, pair.y - problem.mapping(pair.x)])


def reformulation_residual(problem: TcpProblem, pair: CandidatePair) -> float:
    """2-norm of the reformulation residual vector.

    Zero exactly when (x, y) solves the reformulated system; nonnegativity of
    x and y is not part of this number.

    Raises:
        ShapeError: If the pair does not match the problem dimension.
    """
    return float(np.linalg.norm(reformulation_residual_vector(problem, pair)))


@dataclass(frozen=True)
class SolutionReport:
    """Outcome of judging a candidate against the complementarity conditions."""

    ok: bool
    failed: tuple[str, ...] = field(default_factory=tuple)
    min_x: float = 0.0
    min_y: float = 0.0
    gap: float = 0.0


def is_solution(problem: TcpProblem, pair: CandidatePair, tol: float) -> SolutionReport:
    """Judge whether ``pair.x`` solves TCP(A, q).

    ``y`` is recomputed from ``x``; the stored ``pair.y`` is not trusted.
    Nonnegativity is checked absolutely at ``-tol``; complementarity is
    checked relative to ``(1 + ||x||_inf) * (1 + ||q||_inf)``.

    Args:
        problem: The problem.
        pair: Candidate; only ``x`` is used.
        tol: Positive tolerance.

    Returns:
        Report whose ``failed`` lists "nonnegativity", "feasibility" or
        "complementarity" for each violated condition.

    Raises:
        ParameterError: If ``tol`` is not positive.
    """
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    x = pair.x
    y = problem.mapping(x)
    min_x = float(np.min(x))
    min_y = float(np.min(y))
    gap = float(np.dot(x, y))

    failed: list[str] = []
    if min_x < -tol:
        failed.append("nonnegativity")
    if min_y < -tol:
        failed.append("feasibility")
    scale = (1.0 + float(np.max(np.abs(x)))) * (1.0 + float(np.max(np.abs(problem.q))))
    if abs(gap) > tol * scale:
        failed.append("complementarity")

    return SolutionReport(
        ok=not failed, failed=tuple(failed), min_x=min_x, min_y=min_y, gap=gap
    )
