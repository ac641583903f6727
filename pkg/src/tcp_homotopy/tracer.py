"""Euler-Newton predictor-corrector tracing of the homotopy path.

The path is followed from t = 1 to t = 0. Each step predicts along the
tangent, corrects with Newton's method at the new t, and adapts the step
size from the number of corrector iterations.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike

from tcp_homotopy.exceptions import ParameterError, PredictorError
from tcp_homotopy.homotopy import (
    HomotopyParams,
    HomotopyPoint,
    check_dimensions,
    evaluate_h,
    jacobian_t,
    jacobian_z,
    start_point,
)
from tcp_homotopy.model import CandidatePair, TcpProblem, reformulation_residual
from tcp_homotopy.oracle import SNAP_THRESHOLD, newton_on_support
from tcp_homotopy.tensor import FloatArray

logger = logging.getLogger(__name__)

# Singular values below this fraction of the largest are dropped in the corrector.
PINV_RCOND = 1e-12
# Newton iterations above this count halve the next step.
CUT_THRESHOLD = 3
GUARD_SLACK = 10.0


class TraceStatus(Enum):
    """Termination status of a trace."""

    CONVERGED = "converged"
    STALLED = "stalled"
    GUARD_TRIPPED = "guard_tripped"
    MAX_STEPS = "max_steps"


@dataclass(frozen=True)
class TracerConfig:
    """Settings of the predictor-corrector loop.

    Attributes:
        params: Homotopy vectors a and b.
        dt0: Initial step size.
        eps1: Corrector tolerance on interior steps.
        eps2: Corrector tolerance on the terminal step (t = 0).
        dt_min: Smallest step size.
        dt_max: Largest step size.
        max_newton_per_step: Corrector budget on interior steps.
        final_newton_iters: Corrector budget on the terminal step, where the
            Jacobian may be singular and Newton only converges linearly.
        max_steps: Budget of step attempts, accepted or rejected.
        cond_limit: Tangent systems with a larger condition number are
            treated as singular.
        guard_radius: Fallback bound on ||x||_inf when no beta is known.
        beta_estimate: Estimate of beta(A) for the divergence guard.
        snap_threshold: Terminal coordinates at or below this are pinned to
            zero by the endpoint polish; 0 disables it.
    """

    params: HomotopyParams
    dt0: float = 0.1
    eps1: float = 1e-5
    eps2: float = 1e-12
    dt_min: float = 1e-6
    dt_max: float = 0.5
    max_newton_per_step: int = 20
    final_newton_iters: int = 60
    max_steps: int = 1000
    cond_limit: float = 1e14
    guard_radius: float | None = None
    beta_estimate: float | None = None
    snap_threshold: float = SNAP_THRESHOLD

    def __post_init__(self) -> None:
        if not 0 < self.dt_min <= self.dt0 <= self.dt_max <= 1:
            raise ParameterError(
                "Step sizes must satisfy 0 < dt_min <= dt0 <= dt_max <= 1, got "
                f"dt_min={self.dt_min}, dt0={self.dt0}, dt_max={self.dt_max}"
            )
        if not 0 < self.eps2 <= self.eps1:
            raise ParameterError(
                f"Tolerances must satisfy 0 < eps2 <= eps1, got eps1={self.eps1}, "
                f"eps2={self.eps2}"
            )
        if self.max_newton_per_step < 1 or self.final_newton_iters < 1:
            raise ParameterError("Newton iteration budgets must be positive")
        if self.max_steps < 1:
            raise ParameterError("max_steps must be positive")
        if self.guard_radius is not None and self.guard_radius <= 0:
            raise ParameterError("guard_radius must be positive")
        if self.snap_threshold < 0:
            raise ParameterError("snap_threshold must be non-negative")

    def echo(self) -> dict[str, object]:
        """Plain-data view for reports."""
        return {
            "a": self.params.a.tolist(),
            "b": self.params.b.tolist(),
            "relaxed": self.params.relaxed,
            "dt0": self.dt0,
            "eps1": self.eps1,
            "eps2": self.eps2,
            "dt_min": self.dt_min,
            "dt_max": self.dt_max,
            "max_newton_per_step": self.max_newton_per_step,
            "final_newton_iters": self.final_newton_iters,
            "max_steps": self.max_steps,
            "cond_limit": self.cond_limit,
            "guard_radius": self.guard_radius,
            "beta_estimate": self.beta_estimate,
            "snap_threshold": self.snap_threshold,
        }


@dataclass(frozen=True)
class StepController:
    """Adaptive step size state.

    ``consecutive_uncut`` counts accepted steps since the last cut or doubling.
    """

    current_dt: float
    consecutive_uncut: int = 0
    dt_min: float = 1e-6
    dt_max: float = 0.5

    def __post_init__(self) -> None:
        clamped = min(max(self.current_dt, self.dt_min), self.dt_max)
        object.__setattr__(self, "current_dt", clamped)


class CorrectorResult(NamedTuple):
    """Outcome of a Newton correction."""

    z: FloatArray
    iterations: int
    converged: bool
    residual_norms: list[float]


@dataclass(frozen=True)
class StepRecord:
    """One attempted step, accepted or rejected."""

    step: int
    t: float
    dt: float
    newton_iterations: int
    residual: float
    x_inf: float
    accepted: bool
    reason: str | None = None


@dataclass
class TraceResult:
    """Outcome of tracing the homotopy path."""

    solution: CandidatePair
    residue: float
    itr: int
    nwtitr: int
    status: TraceStatus
    path: list[HomotopyPoint] = field(default_factory=list)
    steps: list[StepRecord] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        """Whether the trace reached t = 0."""
        return self.status is TraceStatus.CONVERGED


def update_step(
    ctrl: StepController, newton_iters_used: int, cut_threshold: int = CUT_THRESHOLD
) -> StepController:
    """Adapt the step size after an accepted step.

    More than ``cut_threshold`` corrector iterations halve the step and reset
    the counter. Otherwise the counter grows, and two consecutive uncut steps
    double the step and reset the counter. The result stays in
    ``[dt_min, dt_max]``.
    """
    if newton_iters_used > cut_threshold:
        return replace(ctrl, current_dt=ctrl.current_dt * 0.5, consecutive_uncut=0)

    uncut = ctrl.consecutive_uncut + 1
    if uncut >= 2:
        return replace(ctrl, current_dt=ctrl.current_dt * 2.0, consecutive_uncut=0)
    return replace(ctrl, consecutive_uncut=uncut)


def cut_step(ctrl: StepController, dt_attempted: float) -> StepController:
    """Halve the attempted step after a rejected step."""
    return replace(ctrl, current_dt=dt_attempted * 0.5, consecutive_uncut=0)


def euler_predict(
    problem: TcpProblem,
    params: HomotopyParams,
    pt: HomotopyPoint,
    dt: float,
    cond_limit: float = 1e14,
) -> tuple[FloatArray, FloatArray]:
    """Euler predictor toward ``t - dt``.

    The tangent ``g = dz/dt`` solves ``D_z H g = -D_t H``; since t decreases,
    the prediction is ``z - dt * g``.

    Returns:
        Tuple of (predicted z, tangent g).

    Raises:
        PredictorError: If ``D_z H`` is singular or its condition number
            exceeds ``cond_limit``.
    """
    jz = jacobian_z(problem, pt)
    jt = jacobian_t(problem, params, pt)

    cond = float(np.linalg.cond(jz))
    if not np.isfinite(cond) or cond > cond_limit:
        raise PredictorError(f"Tangent system ill-conditioned (cond={cond:.3e})")
    try:
        g = np.linalg.solve(jz, -jt)
    except np.linalg.LinAlgError as e:
        raise PredictorError("Tangent system is singular") from e

    return pt.z - dt * g, g


def newton_correct(
    problem: TcpProblem,
    params: HomotopyParams,
    z_init: ArrayLike,
    t_fixed: float,
    tol: float,
    max_iter: int,
) -> CorrectorResult:
    """Newton's method on ``H(., t_fixed) = 0`` with a pseudo-inverse step.

    Each update is ``w - pinv(D_z H(w)) H(w)``, computed as a minimum-norm
    least-squares solve that drops singular values below 1e-12 of the largest.
    Stops when ``||H||_2 <= tol``, after ``max_iter`` updates, or at a
    non-finite iterate or residual.
    """
    w = np.array(z_init, dtype=np.float64)
    pt = HomotopyPoint.from_z(w, t_fixed)
    h = evaluate_h(problem, params, pt)
    norms = [float(np.linalg.norm(h))]
    iterations = 0

    while not norms[-1] <= tol:
        if iterations >= max_iter or not np.isfinite(norms[-1]):
            return CorrectorResult(w, iterations, False, norms)
        jz = jacobian_z(problem, pt)
        delta = np.linalg.lstsq(jz, h, rcond=PINV_RCOND)[0]
        w = w - delta
        iterations += 1
        if not np.all(np.isfinite(w)):
            return CorrectorResult(w, iterations, False, norms)
        pt = HomotopyPoint.from_z(w, t_fixed)
        h = evaluate_h(problem, params, pt)
        norms.append(float(np.linalg.norm(h)))

    return CorrectorResult(w, iterations, True, norms)


def path_bound(
    problem: TcpProblem, params: HomotopyParams, t: float, beta: float
) -> float:
    """Bound on ``||x||_inf^(m-1)`` along the path at ``t < 1`` given beta(A) > 0."""
    numerator = (
        float(np.max(params.a))
        + float(np.max(np.abs(problem.q)))
        + float(np.max(np.abs(params.b)))
    )
    return max(1.0, numerator / ((1.0 - t) * beta))


def divergence_guard(
    problem: TcpProblem,
    cfg: TracerConfig,
    pt: HomotopyPoint,
    beta_estimate: float | None = None,
) -> bool:
    """Whether the point has left the region the path is known to stay in.

    With a positive beta estimate, trips when ``||x||_inf^(m-1)`` exceeds ten
    times the path bound at ``pt.t``. Without one, trips when ``||x||_inf``
    exceeds ``cfg.guard_radius`` (if set). Never trips at t = 1.
    """
    if pt.t >= 1.0:
        return False
    x_inf = float(np.max(np.abs(pt.x)))
    if beta_estimate is not None and beta_estimate > 0:
        bound = path_bound(problem, cfg.params, pt.t, beta_estimate)
        return bool(x_inf ** (problem.order - 1) > GUARD_SLACK * bound)
    if cfg.guard_radius is not None:
        return x_inf > cfg.guard_radius
    return False


def polish_endpoint(
    problem: TcpProblem,
    x: ArrayLike,
    tol: float,
    snap_threshold: float = SNAP_THRESHOLD,
) -> CandidatePair | None:
    """Re-solve a terminal point with its near-zero coordinates pinned to zero.

    At a singular endpoint the corrector meets ``eps2`` while a coordinate
    that should vanish is still around ``eps2^(1/m)``. Coordinates at or
    below ``snap_threshold`` are set to zero and the rest re-solved on the
    smaller support.

    Returns:
        The polished pair, or None if nothing was snapped or the result is
        not a solution with ``y >= -tol`` and residue at most ``tol``.
    """
    xv = np.asarray(x, dtype=np.float64)
    keep = xv > snap_threshold
    if np.all(keep):
        return None

    support = tuple(int(i) for i in np.flatnonzero(keep))
    values = xv[keep]
    if support:
        target = 1e-13 * (1.0 + float(np.max(np.abs(problem.q))))
        values, _ = newton_on_support(problem, support, values, target)
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            return None

    polished = np.zeros(problem.dim)
    polished[list(support)] = values
    pair = CandidatePair.from_x(problem, polished)
    if float(np.min(pair.y)) < -tol or reformulation_residual(problem, pair) > tol:
        return None
    return pair


def trace(
    problem: TcpProblem,
    cfg: TracerConfig,
    on_step: Callable[[StepRecord], None] | None = None,
) -> TraceResult:
    """Trace the homotopy path from t = 1 to t = 0.

    Args:
        problem: The complementarity problem.
        cfg: Tracer settings.
        on_step: Called with a record for every attempted step.

    Returns:
        TraceResult. On ``converged`` the solution satisfies
        ``||H(z, 0)|| <= eps2`` and ``x, y >= -eps2``, with near-zero
        coordinates polished to exact zeros when that keeps it a solution;
        otherwise it holds the last accepted point.

    Raises:
        ShapeError: If the homotopy vectors do not match the problem.
    """
    params = cfg.params
    check_dimensions(problem, params)

    pt = start_point(params)
    path = [pt]
    steps: list[StepRecord] = []
    ctrl = StepController(cfg.dt0, 0, cfg.dt_min, cfg.dt_max)
    itr = 0
    nwtitr = 0
    attempts = 0
    status = TraceStatus.MAX_STEPS

    def emit(record: StepRecord) -> None:
        steps.append(record)
        if on_step is not None:
            on_step(record)

    while attempts < cfg.max_steps:
        attempts += 1
        dt = ctrl.current_dt
        t_next = pt.t - dt
        final = t_next <= cfg.dt_min
        if final:
            t_next = 0.0
            dt = pt.t

        reason: str | None = None
        corr: CorrectorResult | None = None
        try:
            z_pred, _ = euler_predict(problem, params, pt, dt, cfg.cond_limit)
        except PredictorError as e:
            reason = str(e)
        else:
            if not final and float(np.min(z_pred)) < -cfg.eps1:
                reason = "predictor left the positive orthant"
            else:
                corr = newton_correct(
                    problem,
                    params,
                    z_pred,
                    t_next,
                    cfg.eps2 if final else cfg.eps1,
                    cfg.final_newton_iters if final else cfg.max_newton_per_step,
                )
                nwtitr += corr.iterations
                if not corr.converged:
                    reason = "corrector did not converge"
                elif final and float(np.min(corr.z)) < -cfg.eps2:
                    reason = "terminal point is negative"
                elif not final and float(np.min(corr.z)) <= 0.0:
                    reason = "corrector left the positive orthant"

        iterations = corr.iterations if corr is not None else 0
        residual = corr.residual_norms[-1] if corr is not None else float("nan")

        if reason is not None:
            x_inf = float(np.max(np.abs(pt.x)))
            emit(
                StepRecord(
                    itr + 1, t_next, dt, iterations, residual, x_inf, False, reason
                )
            )
            logger.debug("Rejected step t=%.6g dt=%.3g: %s", t_next, dt, reason)
            if dt <= cfg.dt_min:
                status = TraceStatus.STALLED
                break
            ctrl = cut_step(ctrl, dt)
            continue

        assert corr is not None
        pt = HomotopyPoint.from_z(corr.z, t_next)
        path.append(pt)
        itr += 1
        x_inf = float(np.max(np.abs(pt.x)))
        emit(StepRecord(itr, t_next, dt, corr.iterations, residual, x_inf, True))
        logger.debug(
            "Accepted step %d: t=%.6g dt=%.3g newton=%d |H|=%.3e |x|=%.4g",
            itr,
            t_next,
            dt,
            corr.iterations,
            residual,
            x_inf,
        )

        if final:
            polished: CandidatePair | None = None
            if cfg.snap_threshold > 0:
                polished = polish_endpoint(
                    problem, pt.x, cfg.eps2, cfg.snap_threshold
                )
            if polished is not None:
                logger.debug(
                    "Polished endpoint: max shift %.3e",
                    float(np.max(np.abs(polished.x - pt.x))),
                )
                pt = HomotopyPoint(polished.x, polished.y, 0.0)
                path[-1] = pt
            status = TraceStatus.CONVERGED
            break
        if divergence_guard(problem, cfg, pt, cfg.beta_estimate):
            status = TraceStatus.GUARD_TRIPPED
            break
        ctrl = update_step(ctrl, corr.iterations)

    solution = CandidatePair(pt.x, pt.y)
    residue = reformulation_residual(problem, solution)

    if status is TraceStatus.CONVERGED:
        logger.info(
            "Converged: itr=%d nwtitr=%d residue=%.4e", itr, nwtitr, residue
        )
    else:
        logger.warning(
            "Trace ended with status %s at t=%.6g (itr=%d, nwtitr=%d); "
            "consider a perturbed b",
            status.value,
            pt.t,
            itr,
            nwtitr,
        )

    return TraceResult(
        solution=solution,
        residue=residue,
        itr=itr,
        nwtitr=nwtitr,
        status=status,
        path=path,
        steps=steps,
    )
