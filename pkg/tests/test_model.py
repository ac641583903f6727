"""Tests for model module."""

import numpy as np
import pytest

from tcp_homotopy.examples import ORDER3_STRONG_SSP, ORDER5_DIAGONAL
from tcp_homotopy.exceptions import ParameterError, ShapeError
from tcp_homotopy.model import (
    CandidatePair,
    TcpProblem,
    is_solution,
    reformulation_residual,
    reformulation_residual_vector,
)
from tcp_homotopy.tensor import DenseTensor


class TestTcpProblem:
    """Tests for TcpProblem."""

    def test_mapping(self) -> None:
        """mapping(x) is A x^(m-1) + q."""
        problem = ORDER3_STRONG_SSP.problem([-5.0, -3.0])
        np.testing.assert_allclose(problem.mapping([1.0, 2.0]), [-6.0, 2.0])

    def test_q_length_mismatch(self) -> None:
        """q must have length n."""
        with pytest.raises(ShapeError):
            TcpProblem(DenseTensor.zeros(3, 2), np.zeros(3))

    def test_q_is_frozen(self) -> None:
        """q is copied and read-only."""
        q = np.array([1.0, 2.0])
        problem = TcpProblem(DenseTensor.zeros(2, 2), q)
        q[0] = 99.0
        assert problem.q[0] == 1.0
        with pytest.raises(ValueError):
            problem.q[0] = 5.0

    def test_with_q(self) -> None:
        """with_q keeps the tensor."""
        problem = ORDER3_STRONG_SSP.problem([-5.0, -3.0])
        other = problem.with_q([1.0, 1.0])
        assert other.tensor is problem.tensor
        assert other.q.tolist() == [1.0, 1.0]


class TestResidual:
    """Tests for the reformulation residual."""

    def test_zero_at_exact_solution(self) -> None:
        """The diagonal example's solution has a tiny residual."""
        problem = ORDER5_DIAGONAL.problem([-3.0, -2.0, -3.0])
        pair = CandidatePair.from_x(problem, [3.0**0.25, 1.0, 1.0])
        assert reformulation_residual(problem, pair) < 1e-12

    def test_vector_layout(self) -> None:
        """First block is x * y, second is y - f(x)."""
        problem = ORDER3_STRONG_SSP.problem([0.0, 0.0])
        pair = CandidatePair(np.array([1.0, 2.0]), np.array([3.0, 4.0]))
        vec = reformulation_residual_vector(problem, pair)
        np.testing.assert_allclose(vec, [3.0, 8.0, 4.0, -1.0])

    def test_dimension_mismatch(self) -> None:
        """Pairs of the wrong dimension are rejected."""
        problem = ORDER3_STRONG_SSP.problem([0.0, 0.0])
        pair = CandidatePair(np.zeros(3), np.zeros(3))
        with pytest.raises(ShapeError):
            reformulation_residual(problem, pair)

    def test_pair_shape_mismatch(self) -> None:
        """x and y must have the same length."""
        with pytest.raises(ShapeError):
            CandidatePair(np.zeros(2), np.zeros(3))


class TestIsSolution:
    """Tests for is_solution."""

    def test_zero_solves_positive_q(self) -> None:
        """x = 0 solves TCP(A, q) for q >= 0."""
        problem = ORDER3_STRONG_SSP.problem([5.0, 3.0])
        report = is_solution(problem, CandidatePair.from_x(problem, [0.0, 0.0]), 1e-8)
        assert report.ok
        assert report.failed == ()

    def test_infeasible(self) -> None:
        """x = 0 is infeasible when q has a negative entry."""
        problem = ORDER3_STRONG_SSP.problem([-5.0, -3.0])
        report = is_solution(problem, CandidatePair.from_x(problem, [0.0, 0.0]), 1e-8)
        assert not report.ok
        assert report.failed == ("feasibility",)
        assert report.min_y == -5.0

    def test_negative_x(self) -> None:
        """Negative x fails nonnegativity."""
        problem = ORDER3_STRONG_SSP.problem([5.0, 3.0])
        report = is_solution(
            problem, CandidatePair.from_x(problem, [-1e-3, 0.0]), 1e-8
        )
        assert "nonnegativity" in report.failed

    def test_complementarity_gap(self) -> None:
        """A positive gap fails complementarity."""
        problem = ORDER5_DIAGONAL.problem([1.0, 2.0, 3.0])
        report = is_solution(
            problem, CandidatePair.from_x(problem, [1.0, 0.0, 0.0]), 1e-8
        )
        assert report.failed == ("complementarity",)
        assert report.gap == pytest.approx(2.0)

    def test_stored_y_is_ignored(self) -> None:
        """y is recomputed from x."""
        problem = ORDER3_STRONG_SSP.problem([-5.0, -3.0])
        pair = CandidatePair(np.zeros(2), np.zeros(2))
        assert not is_solution(problem, pair, 1e-8).ok

    def test_reference_solution(self) -> None:
        """The diagonal example's reference solution passes."""
        problem = ORDER5_DIAGONAL.problem([-3.0, -2.0, -3.0])
        pair = CandidatePair.from_x(problem, [3.0**0.25, 1.0, 1.0])
        assert is_solution(problem, pair, 1e-8).ok

    @pytest.mark.parametrize("tol", [0.0, -1e-8, float("nan")])
    def test_tol_must_be_positive(self, tol: float) -> None:
        """A non-positive tolerance is rejected."""
        problem = ORDER3_STRONG_SSP.problem([5.0, 3.0])
        with pytest.raises(ParameterError):
            is_solution(problem, CandidatePair.from_x(problem, [0.0, 0.0]), tol)
