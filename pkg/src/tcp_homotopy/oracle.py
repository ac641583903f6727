"""Brute-force TCP solver for small problems.

Enumerates every support S (the coordinates where x > 0), solves
``(A x^(m-1) + q)_S = 0`` with ``x = 0`` off S by damped Newton from a grid
of starts, and keeps the feasible complementary points. Independent of the
homotopy, so it serves as a cross-check for the tracer.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from tcp_homotopy.diagnostics import estimate_beta
from tcp_homotopy.exceptions import UnsupportedSizeError
from tcp_homotopy.model import CandidatePair, TcpProblem, is_solution
from tcp_homotopy.tensor import FloatArray, jacobian_of_map

logger = logging.getLogger(__name__)

MAX_DIM = 3
DEDUP_RADIUS = 1e-6
MAX_NEWTON_ITERS = 100
MAX_HALVINGS = 40
FALLBACK_X_MAX = 10.0
# Support coordinates at or below this are retried as zero.
SNAP_THRESHOLD = 1e-3


@dataclass(frozen=True)
class ActiveSetCandidate:
    """Result of solving on one support."""

    support: tuple[int, ...]
    x: FloatArray
    residual: float
    feasible: bool


def default_x_max(problem: TcpProblem, beta: float | None = None) -> float:
    """Start-grid radius: the path bound at t = 0 (a = b = 1), plus one.

    Falls back to 10 when beta is not positive.
    """
    if beta is None:
        beta, _ = estimate_beta(problem.tensor)
    if beta <= 0:
        return FALLBACK_X_MAX
    bound = max(1.0, (2.0 + float(np.max(np.abs(problem.q)))) / beta)
    return float(bound ** (1.0 / (problem.order - 1))) + 1.0


def _embed(dim: int, support: tuple[int, ...], values: FloatArray) -> FloatArray:
    x = np.zeros(dim)
    x[list(support)] = values
    return x


def _restricted_residual(
    problem: TcpProblem, support: tuple[int, ...], values: FloatArray
) -> FloatArray:
    x = _embed(problem.dim, support, values)
    return problem.mapping(x)[list(support)]


def newton_on_support(
    problem: TcpProblem, support: tuple[int, ...], start: FloatArray, target: float
) -> tuple[FloatArray, float]:
    """Damped Newton on ``(A x^(m-1) + q)_S = 0`` with ``x = 0`` off the support.

    Halves each step until the residual drops. Stops at ``target`` or when
    no halving helps.

    Returns:
        Tuple of (values on the support, final residual norm).
    """
    idx = list(support)
    values = start.copy()
    res = _restricted_residual(problem, support, values)
    norm = float(np.linalg.norm(res))

    for _ in range(MAX_NEWTON_ITERS):
        if norm <= target:
            break
        x = _embed(problem.dim, support, values)
        jac = jacobian_of_map(problem.tensor, x)[np.ix_(idx, idx)]
        step = np.linalg.lstsq(jac, res, rcond=1e-12)[0]

        lam = 1.0
        for _ in range(MAX_HALVINGS):
            cand = values - lam * step
            cand_res = _restricted_residual(problem, support, cand)
            cand_norm = float(np.linalg.norm(cand_res))
            if np.isfinite(cand_norm) and cand_norm < norm:
                values, res, norm = cand, cand_res, cand_norm
                break
            lam *= 0.5
        else:
            break

    return values, norm


def solve_support(
    problem: TcpProblem,
    support: tuple[int, ...],
    x_max: float,
    starts_per_support: int,
    tol: float,
) -> list[ActiveSetCandidate]:
    """Solve on one support from a grid of starts in ``(0, x_max]^|S|``."""
    n = problem.dim
    if not support:
        x = np.zeros(n)
        pair = CandidatePair.from_x(problem, x)
        return [ActiveSetCandidate((), x, 0.0, is_solution(problem, pair, tol).ok)]

    target = 1e-13 * (1.0 + float(np.max(np.abs(problem.q))))
    axis = np.linspace(x_max / starts_per_support, x_max, starts_per_support)
    candidates: list[ActiveSetCandidate] = []
    for start in itertools.product(axis, repeat=len(support)):
        values, norm = newton_on_support(problem, support, np.array(start), target)
        if not np.all(np.isfinite(values)) or np.any(values < -tol):
            continue
        cand = _candidate(problem, support, values, norm, tol)
        if np.any(values <= SNAP_THRESHOLD):
            snapped = _snap_to_smaller_support(problem, support, values, target, tol)
            if snapped is not None:
                cand = snapped
        candidates.append(cand)
    return candidates


def _candidate(
    problem: TcpProblem,
    support: tuple[int, ...],
    values: FloatArray,
    norm: float,
    tol: float,
) -> ActiveSetCandidate:
    x = _embed(problem.dim, support, np.where(values < 0, 0.0, values))
    feasible = is_solution(problem, CandidatePair.from_x(problem, x), tol).ok
    return ActiveSetCandidate(support, x, norm, feasible)


def _snap_to_smaller_support(
    problem: TcpProblem,
    support: tuple[int, ...],
    values: FloatArray,
    target: float,
    tol: float,
) -> ActiveSetCandidate | None:
    """Re-solve without the near-zero coordinates.

    On a singular support Newton stalls with a coordinate around
    ``eps^(1/(m-1))`` instead of zero; the smaller support pins it exactly.
    Returns None unless the re-solved point is feasible.
    """
    keep = values > SNAP_THRESHOLD
    reduced = tuple(i for i, k in zip(support, keep, strict=True) if k)
    if reduced:
        reduced_values, norm = newton_on_support(problem, reduced, values[keep], target)
        if not np.all(np.isfinite(reduced_values)) or np.any(reduced_values < -tol):
            return None
    else:
        reduced_values, norm = np.zeros(0), 0.0
    cand = _candidate(problem, reduced, reduced_values, norm, tol)
    return cand if cand.feasible else None


def solve_brute_force(
    problem: TcpProblem,
    tol: float = 1e-8,
    starts_per_support: int = 4,
    x_max: float | None = None,
) -> list[CandidatePair]:
    """All solutions found by support enumeration, sorted lexicographically.

    Args:
        problem: Problem with dimension at most 3.
        tol: Tolerance passed to ``is_solution``.
        starts_per_support: Grid points per axis for the Newton starts.
        x_max: Radius of the start grid; defaults to ``default_x_max``.

    Returns:
        Verified solutions, distinct by more than 1e-6 in the inf-norm. Empty
        if nothing was found.

    Raises:
        UnsupportedSizeError: If the dimension exceeds 3.
    """
    n = problem.dim
    if n > MAX_DIM:
        raise UnsupportedSizeError(f"Brute force supports n <= {MAX_DIM}, got n={n}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if x_max is None:
        x_max = default_x_max(problem)

    found: list[FloatArray] = []
    for size in range(n + 1):
        for support in itertools.combinations(range(n), size):
            for cand in solve_support(problem, support, x_max, starts_per_support, tol):
                if not cand.feasible:
                    continue
                if any(np.max(np.abs(cand.x - x)) < DEDUP_RADIUS for x in found):
                    continue
                found.append(cand.x)

    found.sort(key=lambda x: tuple(x.tolist()))
    logger.debug("Brute force found %d solution(s)", len(found))
    return [CandidatePair.from_x(problem, x) for x in found]
