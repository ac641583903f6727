"""Problem files and run reports (JSON).

Problem file schema::

    {"m": 3, "n": 2,
     "entries": [{"idx": [1, 1, 1], "val": 1.0}, ...],
     "q": [-5, -3]}

Indices are 1-based; unlisted entries are zero.
"""

from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from tcp_homotopy.exceptions import ProblemFileError
from tcp_homotopy.model import CandidatePair, TcpProblem, reformulation_residual
from tcp_homotopy.tensor import DenseTensor
from tcp_homotopy.tracer import StepRecord, TraceResult


class TensorEntry(BaseModel):
    """One nonzero tensor entry."""

    idx: list[int]
    val: float


class ProblemFile(BaseModel):
    """Serialized TCP(A, q)."""

    m: int = Field(ge=2)
    n: int = Field(ge=1)
    entries: list[TensorEntry] = Field(default_factory=list)
    q: list[float]

    @model_validator(mode="after")
    def _check_consistency(self) -> "ProblemFile":
        if len(self.q) != self.n:
            raise ValueError(f"q has length {len(self.q)}, expected n={self.n}")
        seen: set[tuple[int, ...]] = set()
        for pos, entry in enumerate(self.entries):
            key = tuple(entry.idx)
            if len(key) != self.m:
                raise ValueError(f"entries[{pos}].idx must have m={self.m} indices")
            if any(i < 1 or i > self.n for i in key):
                raise ValueError(
                    f"entries[{pos}].idx {list(key)} outside [1, {self.n}]"
                )
            if key in seen:
                raise ValueError(f"entries[{pos}].idx {list(key)} is a duplicate")
            seen.add(key)
        return self

    def to_problem(self) -> TcpProblem:
        """Build the in-memory problem."""
        tensor = DenseTensor.from_entries(
            self.m, self.n, [(e.idx, e.val) for e in self.entries]
        )
        return TcpProblem(tensor, np.asarray(self.q, dtype=np.float64))

    @classmethod
    def from_problem(cls, problem: TcpProblem) -> "ProblemFile":
        """Serialize the nonzero entries of a problem."""
        return cls(
            m=problem.order,
            n=problem.dim,
            entries=[
                TensorEntry(idx=list(idx), val=val)
                for idx, val in problem.tensor.entries()
            ],
            q=problem.q.tolist(),
        )


def _format_errors(error: ValidationError) -> list[str]:
    details: list[str] = []
    for err in error.errors():
        loc = ".".join(str(part) for part in err["loc"]) or "<root>"
        details.append(f"{loc}: {err['msg']}")
    return details


def parse_problem(text: str, source: str = "<string>") -> TcpProblem:
    """Parse and validate a problem file's JSON text.

    Raises:
        ProblemFileError: With one detail per invalid field. JSON syntax
            errors report line and column.
    """
    try:
        pf = ProblemFile.model_validate_json(text)
    except ValidationError as e:
        raise ProblemFileError(
            f"Invalid problem file {source}", _format_errors(e)
        ) from e
    return pf.to_problem()


def load_problem(path: Path) -> TcpProblem:
    """Read a problem file (UTF-8 JSON).

    Raises:
        ProblemFileError: If the file is missing or invalid.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ProblemFileError(f"Cannot read problem file {path}: {e}") from e
    return parse_problem(text, str(path))


def dump_problem(problem: TcpProblem) -> str:
    """Problem file JSON text."""
    return ProblemFile.from_problem(problem).model_dump_json(indent=2)


class StepEntry(BaseModel):
    """Serialized step record."""

    step: int
    t: float
    dt: float
    newton_iterations: int
    residual: float | None
    x_inf: float
    accepted: bool
    reason: str | None = None

    @classmethod
    def from_record(cls, record: StepRecord) -> "StepEntry":
        residual = record.residual if np.isfinite(record.residual) else None
        return cls(
            step=record.step,
            t=record.t,
            dt=record.dt,
            newton_iterations=record.newton_iterations,
            residual=residual,
            x_inf=record.x_inf,
            accepted=record.accepted,
            reason=record.reason,
        )


class RunReport(BaseModel):
    """Result of a solve, mirroring the columns of the reference tables."""

    solution: list[float]
    y: list[float]
    residue: float
    itr: int
    nwtitr: int
    status: str
    config: dict[str, Any]
    trace: list[StepEntry] | None = None
    wall_time: float | None = None

    @classmethod
    def from_result(
        cls,
        result: TraceResult,
        config: dict[str, Any],
        include_trace: bool = False,
        wall_time: float | None = None,
    ) -> "RunReport":
        """Build a report from a trace result."""
        steps = [StepEntry.from_record(s) for s in result.steps]
        return cls(
            solution=result.solution.x.tolist(),
            y=result.solution.y.tolist(),
            residue=result.residue,
            itr=result.itr,
            nwtitr=result.nwtitr,
            status=result.status.value,
            config=config,
            trace=steps if include_trace else None,
            wall_time=wall_time,
        )

    def recompute_residue(self, problem: TcpProblem) -> float:
        """Residue of the stored (solution, y) against ``problem``."""
        return reformulation_residual(
            problem, CandidatePair(np.asarray(self.solution), np.asarray(self.y))
        )

    def summary(self) -> str:
        """One-line human-readable summary."""
        solution = ", ".join(f"{v:.4f}" for v in self.solution)
        return (
            f"status={self.status} itr={self.itr} nwtitr={self.nwtitr} "
            f"solution=[{solution}] residue={self.residue:.4e}"
        )
