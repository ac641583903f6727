"""Tests for homotopy module."""

import numpy as np
import pytest

from tcp_homotopy.examples import ORDER3_STRONG_SSP, ORDER4_P_TENSOR
from tcp_homotopy.exceptions import ParameterError, ShapeError
from tcp_homotopy.homotopy import (
    HomotopyParams,
    HomotopyPoint,
    evaluate_h,
    jacobian_t,
    jacobian_z,
    start_point,
)
from tcp_homotopy.model import TcpProblem
from tcp_homotopy.tensor import DenseTensor

# Seeded instances over m in {3, 4, 5} and n in {2, 3, 4}.
RANDOM_CASES = [
    (order, dim, seed) for order in (3, 4, 5) for dim in (2, 3, 4) for seed in range(12)
]


@pytest.fixture
def problem() -> TcpProblem:
    """Order 4 example with a mixed-sign q."""
    return ORDER4_P_TENSOR.problem([-5.0, 3.0])


class TestHomotopyParams:
    """Tests for HomotopyParams validation and helpers."""

    def test_uniform(self) -> None:
        """uniform builds constant vectors."""
        params = HomotopyParams.uniform(3)
        assert params.a.tolist() == [1.0, 1.0, 1.0]
        assert params.b.tolist() == [1.0, 1.0, 1.0]
        assert params.dim == 3

    def test_b_must_be_positive(self) -> None:
        """Zero or negative b is rejected."""
        with pytest.raises(ParameterError):
            HomotopyParams(np.ones(2), np.array([1.0, 0.0]))

    def test_a_must_be_positive(self) -> None:
        """Zero a is rejected unless relaxed."""
        with pytest.raises(ParameterError):
            HomotopyParams(np.array([0.0, 1.0]), np.ones(2))
        params = HomotopyParams(np.array([0.0, 1.0]), np.ones(2), relaxed=True)
        assert params.relaxed

    def test_relaxed_still_rejects_negative_a(self) -> None:
        """Relaxed mode allows zeros, not negatives."""
        with pytest.raises(ParameterError):
            HomotopyParams(np.array([-1.0, 1.0]), np.ones(2), relaxed=True)

    def test_length_mismatch(self) -> None:
        """a and b must have the same length."""
        with pytest.raises(ShapeError):
            HomotopyParams(np.ones(2), np.ones(3))

    def test_non_finite(self) -> None:
        """NaN entries are rejected."""
        with pytest.raises(ParameterError):
            HomotopyParams(np.array([np.nan, 1.0]), np.ones(2))

    def test_perturbed(self) -> None:
        """perturbed scales b by factors in [0.9, 1.1] and keeps a."""
        params = HomotopyParams.uniform(4, a=2.0, b=3.0)
        perturbed = params.perturbed(seed=7)
        np.testing.assert_array_equal(perturbed.a, params.a)
        assert np.all(perturbed.b >= 2.7)
        assert np.all(perturbed.b <= 3.3)
        assert not np.array_equal(perturbed.b, params.b)
        np.testing.assert_array_equal(perturbed.b, params.perturbed(seed=7).b)


class TestHomotopyPoint:
    """Tests for HomotopyPoint."""

    def test_t_out_of_range(self) -> None:
        """t must lie in [0, 1]."""
        with pytest.raises(ParameterError):
            HomotopyPoint(np.ones(2), np.ones(2), 1.5)

    def test_from_z(self) -> None:
        """from_z splits the stacked vector."""
        pt = HomotopyPoint.from_z([1.0, 2.0, 3.0, 4.0], 0.5)
        assert pt.x.tolist() == [1.0, 2.0]
        assert pt.y.tolist() == [3.0, 4.0]
        assert pt.z.tolist() == [1.0, 2.0, 3.0, 4.0]


class TestEvaluateH:
    """Tests for evaluate_h."""

    def test_start_point_is_zero(self, problem: TcpProblem) -> None:
        """H vanishes at (a / b, b, 1)."""
        params = HomotopyParams(np.array([1.0, 2.0]), np.array([2.0, 0.5]))
        pt = start_point(params)
        assert pt.t == 1.0
        np.testing.assert_allclose(pt.x, [0.5, 4.0])
        np.testing.assert_allclose(evaluate_h(problem, params, pt), 0.0, atol=1e-15)

    def test_t_zero_is_reformulation(self, problem: TcpProblem) -> None:
        """At t = 0, H is [x * y ; y - f(x)]."""
        params = HomotopyParams.uniform(2)
        x = np.array([0.5, 1.5])
        y = np.array([2.0, 0.25])
        h = evaluate_h(problem, params, HomotopyPoint(x, y, 0.0))
        np.testing.assert_allclose(h[:2], x * y)
        np.testing.assert_allclose(h[2:], y - problem.mapping(x))

    def test_dimension_mismatch(self, problem: TcpProblem) -> None:
        """Parameters and points must match the problem dimension."""
        params = HomotopyParams.uniform(3)
        with pytest.raises(ShapeError):
            evaluate_h(problem, params, HomotopyPoint(np.ones(2), np.ones(2), 0.5))
        with pytest.raises(ShapeError):
            evaluate_h(
                problem,
                HomotopyParams.uniform(2),
                HomotopyPoint(np.ones(3), np.ones(3), 0.5),
            )


class TestJacobians:
    """Tests for jacobian_z and jacobian_t."""

    @pytest.mark.parametrize("t", [0.0, 0.3, 0.9])
    def test_jacobian_z_matches_finite_differences(
        self, problem: TcpProblem, t: float
    ) -> None:
        """D_z H agrees with central differences."""
        params = HomotopyParams.uniform(2)
        z = np.array([0.7, 1.3, 0.4, 2.1])
        h = 1e-6
        numeric = np.empty((4, 4))
        for j in range(4):
            e = np.zeros(4)
            e[j] = h
            plus = evaluate_h(problem, params, HomotopyPoint.from_z(z + e, t))
            minus = evaluate_h(problem, params, HomotopyPoint.from_z(z - e, t))
            numeric[:, j] = (plus - minus) / (2 * h)
        analytic = jacobian_z(problem, HomotopyPoint.from_z(z, t))
        np.testing.assert_allclose(analytic, numeric, atol=1e-6)

    @pytest.mark.parametrize("order,dim,seed", RANDOM_CASES)
    def test_jacobian_z_random_instances(self, order: int, dim: int, seed: int) -> None:
        """D_z H agrees with central differences to relative error 1e-6."""
        rng = np.random.default_rng(seed)
        tensor = DenseTensor(order, dim, rng.standard_normal(dim**order))
        problem = TcpProblem(tensor, rng.uniform(-2.0, 2.0, size=dim))
        params = HomotopyParams(
            rng.uniform(0.5, 2.0, size=dim), rng.uniform(0.5, 2.0, size=dim)
        )
        z = rng.uniform(0.1, 2.0, size=2 * dim)
        t = float(rng.uniform(0.0, 1.0))
        h = 1e-6 * max(1.0, float(np.max(np.abs(z))))
        numeric = np.empty((2 * dim, 2 * dim))
        for j in range(2 * dim):
            e = np.zeros(2 * dim)
            e[j] = h
            plus = evaluate_h(problem, params, HomotopyPoint.from_z(z + e, t))
            minus = evaluate_h(problem, params, HomotopyPoint.from_z(z - e, t))
            numeric[:, j] = (plus - minus) / (2 * h)
        analytic = jacobian_z(problem, HomotopyPoint.from_z(z, t))
        error = np.max(np.abs(analytic - numeric))
        assert error <= 1e-6 * max(1.0, float(np.max(np.abs(analytic))))

    def test_jacobian_z_block_structure(self) -> None:
        """At t = 1 the lower-left block vanishes."""
        problem = ORDER3_STRONG_SSP.problem([-5.0, -3.0])
        pt = HomotopyPoint(np.array([1.0, 2.0]), np.array([3.0, 4.0]), 1.0)
        jz = jacobian_z(problem, pt)
        np.testing.assert_array_equal(jz[:2, :2], np.diag([3.0, 4.0]))
        np.testing.assert_array_equal(jz[:2, 2:], np.diag([1.0, 2.0]))
        np.testing.assert_array_equal(jz[2:, :2], np.zeros((2, 2)))
        np.testing.assert_array_equal(jz[2:, 2:], np.eye(2))

    def test_jacobian_t_matches_difference(self, problem: TcpProblem) -> None:
        """H is affine in t, so a difference quotient is exact up to rounding."""
        params = HomotopyParams(np.array([1.0, 2.0]), np.array([0.5, 1.5]))
        x = np.array([0.8, 1.1])
        y = np.array([1.2, 0.6])
        h0 = evaluate_h(problem, params, HomotopyPoint(x, y, 0.25))
        h1 = evaluate_h(problem, params, HomotopyPoint(x, y, 0.75))
        jt = jacobian_t(problem, params, HomotopyPoint(x, y, 0.5))
        np.testing.assert_allclose(jt, (h1 - h0) / 0.5, atol=1e-12)
