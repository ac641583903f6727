"""Estimators for structural properties of a tensor.

Nothing here is a proof. ``estimate_beta`` returns an upper bound on
beta(A) found by grid search plus coordinate descent, and the sampled checks
either find a counterexample (a certificate) or report a pass (evidence).
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike

from tcp_homotopy.tensor import DenseTensor, FloatArray, contract_to_vector

logger = logging.getLogger(__name__)

# Sample boxes [0, R] cycle through these scales.
SAMPLE_SCALES = (0.1, 1.0, 10.0)
# Non-strict inequalities fail only below this margin.
VIOLATION_MARGIN = 1e-12
INITIAL_REFINE_STEP = 0.25


class StructuralProperty(str, Enum):
    """Properties checked by sampling."""

    SSP = "ssp"
    P_FUNCTION = "p_function"
    P0_FUNCTION = "p0_function"
    MONOTONE = "monotone"

    @property
    def is_strict(self) -> bool:
        """Whether the defining inequality is strict (> 0)."""
        return self in (StructuralProperty.SSP, StructuralProperty.P_FUNCTION)

    @property
    def uses_pairs(self) -> bool:
        """Whether a witness is a pair of vectors."""
        return self is not StructuralProperty.SSP


@dataclass(frozen=True)
class PropertyCheck:
    """Outcome of a sampled check; ``witness`` is set only on failure."""

    passed: bool
    witness: list[list[float]] | None = None
    value: float | None = None


@dataclass(frozen=True)
class StructureReport:
    """Estimated beta(A) and sampled structure checks."""

    beta_estimate: float
    beta_argmin: list[float]
    sampled_ssp: PropertyCheck
    sampled_p_function: PropertyCheck
    sampled_p0_function: PropertyCheck
    sampled_monotone: PropertyCheck
    samples_used: int
    seed: int = 0
    grid_per_axis: int = 0
    refine_iters: int = 0
    notes: list[str] = field(default_factory=list)


def beta_objective(tensor: DenseTensor, x: ArrayLike) -> float:
    """``max_i x_i (A x^(m-1))_i``, the quantity minimized by beta(A)."""
    vec = np.asarray(x, dtype=np.float64)
    return float(np.max(vec * contract_to_vector(tensor, vec)))


def _face_grid(dim: int, face: int, axis: FloatArray) -> list[FloatArray]:
    """Points of the face ``x[face] = 1`` with free coordinates on ``axis``."""
    points: list[FloatArray] = []
    for combo in itertools.product(axis, repeat=dim - 1):
        x = np.empty(dim)
        x[face] = 1.0
        x[[i for i in range(dim) if i != face]] = combo
        points.append(x)
    return points


def _coordinate_descent(
    tensor: DenseTensor, x: FloatArray, face: int, iters: int
) -> tuple[float, FloatArray]:
    """Pattern search over the free coordinates of a face, kept in [0, 1]."""
    best_x = x.copy()
    best = beta_objective(tensor, best_x)
    step = INITIAL_REFINE_STEP
    free = [i for i in range(tensor.dim) if i != face]

    for _ in range(iters):
        improved = False
        for i in free:
            for direction in (-1.0, 1.0):
                cand = best_x.copy()
                cand[i] = min(1.0, max(0.0, cand[i] + direction * step))
                value = beta_objective(tensor, cand)
                if value < best:
                    best, best_x = value, cand
                    improved = True
        if not improved:
            step *= 0.5
    return best, best_x


def estimate_beta(
    tensor: DenseTensor, grid_per_axis: int = 11, refine_iters: int = 30
) -> tuple[float, FloatArray]:
    """Estimate ``beta(A) = min max_i x_i (A x^(m-1))_i`` on the unit sphere.

    The minimum runs over ``x >= 0`` with ``||x||_inf = 1``.

    The nonnegative unit sphere of the inf-norm is covered by the faces
    ``x_j = 1``. Every grid resolution from 2 up to ``grid_per_axis`` is
    searched and its best point refined by coordinate descent, so a finer
    grid or more refinement never raises the estimate.

    Args:
        tensor: Tensor A.
        grid_per_axis: Largest number of grid points per free coordinate (>= 2).
        refine_iters: Coordinate-descent sweeps per refined point.

    Returns:
        Tuple of (estimate, argument). The estimate is an upper bound on beta.
    """
    if grid_per_axis < 2:
        raise ValueError(f"grid_per_axis must be >= 2, got {grid_per_axis}")

    n = tensor.dim
    best = np.inf
    best_x = np.zeros(n)
    best_x[0] = 1.0

    for level in range(2, grid_per_axis + 1):
        axis = np.linspace(0.0, 1.0, level)
        level_best = np.inf
        level_x = best_x
        level_face = 0
        for face in range(n):
            for x in _face_grid(n, face, axis):
                value = beta_objective(tensor, x)
                if value < level_best:
                    level_best, level_x, level_face = value, x, face
        refined, refined_x = _coordinate_descent(
            tensor, level_x, level_face, refine_iters
        )
        if refined < best:
            best, best_x = refined, refined_x

    logger.debug("beta estimate %.6g at %s", best, best_x)
    return float(best), best_x


def property_value(
    tensor: DenseTensor,
    q: ArrayLike,
    prop: StructuralProperty,
    x: ArrayLike,
    y: ArrayLike | None = None,
) -> float:
    """Left-hand side of the defining inequality of ``prop`` at a witness.

    ssp uses ``max_i x_i (A x^(m-1))_i`` (must be > 0 for x != 0); the pair
    properties use ``f(x) = A x^(m-1) + q``: p_function the max of
    ``(x_i - y_i)(f_i(x) - f_i(y))`` (> 0), p0_function the same max over
    ``x_i != y_i`` (>= 0), monotone ``<x - y, f(x) - f(y)>`` (>= 0).
    """
    xv = np.asarray(x, dtype=np.float64)
    if prop is StructuralProperty.SSP:
        return beta_objective(tensor, xv)

    if y is None:
        raise ValueError(f"{prop.value} needs a pair of vectors")
    yv = np.asarray(y, dtype=np.float64)
    qv = np.asarray(q, dtype=np.float64)
    diff = xv - yv
    fx = contract_to_vector(tensor, xv) + qv
    fy = contract_to_vector(tensor, yv) + qv
    products = diff * (fx - fy)

    if prop is StructuralProperty.MONOTONE:
        return float(np.sum(products))
    if prop is StructuralProperty.P0_FUNCTION:
        return float(np.max(products[diff != 0]))
    return float(np.max(products))


def is_violation(prop: StructuralProperty, value: float) -> bool:
    """Whether a property value violates the defining inequality."""
    if prop.is_strict:
        return value <= 0.0
    return value < -VIOLATION_MARGIN


def sampled_property_check(
    tensor: DenseTensor,
    q: ArrayLike,
    prop: StructuralProperty,
    samples: int = 10_000,
    seed: int = 0,
) -> PropertyCheck:
    """Search random nonnegative vectors (or pairs) for a violation of ``prop``.

    Sample ``k`` is drawn componentwise uniform on ``[0, R]`` with ``R``
    cycling through 0.1, 1 and 10. Zero vectors and identical pairs are
    skipped since the definitions exclude them.

    Returns:
        Failing check with the first witness found, else a pass.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")

    rng = np.random.default_rng(seed)
    n = tensor.dim
    for k in range(samples):
        scale = SAMPLE_SCALES[k % len(SAMPLE_SCALES)]
        x = rng.uniform(0.0, scale, size=n)
        if prop.uses_pairs:
            y = rng.uniform(0.0, scale, size=n)
            if np.array_equal(x, y):
                continue
            value = property_value(tensor, q, prop, x, y)
            witness = [x.tolist(), y.tolist()]
        else:
            if not np.any(x):
                continue
            value = property_value(tensor, q, prop, x)
            witness = [x.tolist()]
        if is_violation(prop, value):
            logger.debug(
                "%s violated after %d samples (value=%.3e)", prop.value, k + 1, value
            )
            return PropertyCheck(passed=False, witness=witness, value=value)

    return PropertyCheck(passed=True)


def structure_report(
    tensor: DenseTensor,
    q: ArrayLike,
    samples: int = 10_000,
    seed: int = 0,
    grid_per_axis: int = 11,
    refine_iters: int = 30,
) -> StructureReport:
    """Run the beta estimate and all sampled checks."""
    beta, argmin = estimate_beta(tensor, grid_per_axis, refine_iters)
    checks = {
        prop: sampled_property_check(tensor, q, prop, samples, seed)
        for prop in StructuralProperty
    }
    notes: list[str] = []
    if beta <= 0:
        notes.append(
            "beta estimate is not positive: tensor is not strictly semi-positive"
        )
    return StructureReport(
        beta_estimate=beta,
        beta_argmin=argmin.tolist(),
        sampled_ssp=checks[StructuralProperty.SSP],
        sampled_p_function=checks[StructuralProperty.P_FUNCTION],
        sampled_p0_function=checks[StructuralProperty.P0_FUNCTION],
        sampled_monotone=checks[StructuralProperty.MONOTONE],
        samples_used=samples,
        seed=seed,
        grid_per_axis=grid_per_axis,
        refine_iters=refine_iters,
        notes=notes,
    )
