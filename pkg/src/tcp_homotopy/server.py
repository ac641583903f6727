"""MCP Server implementation using FastMCP."""

import dataclasses
import time
from typing import Any

from fastmcp import FastMCP
from fastmcp.dependencies import Depends

from tcp_homotopy.cli import run_reference_row, verify_problem
from tcp_homotopy.dependencies import get_settings
from tcp_homotopy.diagnostics import structure_report
from tcp_homotopy.examples import get_example
from tcp_homotopy.model import TcpProblem
from tcp_homotopy.problem_io import ProblemFile, RunReport
from tcp_homotopy.settings import Settings
from tcp_homotopy.tracer import TracerConfig, trace

Response = dict[str, Any]

mcp = FastMCP("tcp-homotopy")


def _build_response(
    results: dict[str, Any], warnings: list[Any] | None = None
) -> Response:
    """Build response dict, attaching warnings when present."""
    response: dict[str, Any] = results
    if warnings:
        response["warnings"] = warnings
    return response


def _load(problem: dict[str, Any]) -> TcpProblem:
    """Validate a problem given in the problem-file schema."""
    return ProblemFile.model_validate(problem).to_problem()


def _config(
    settings: Settings,
    tcp: TcpProblem,
    a: list[float] | None,
    b: list[float] | None,
    beta: float | None = None,
) -> TracerConfig:
    cfg = settings.tracer_config(tcp.dim, a=a, b=b)
    return dataclasses.replace(cfg, beta_estimate=beta)


@mcp.tool()
def solve(
    problem: dict[str, Any],
    a: list[float] | None = None,
    b: list[float] | None = None,
    beta: float | None = None,
    include_trace: bool = False,
    settings: Settings = Depends(get_settings),
) -> Response:
    """Solve a tensor complementarity problem by homotopy continuation.

    Args:
        problem: Problem in file schema: {"m", "n", "entries": [{"idx", "val"}],
            "q"}. Indices are 1-based; unlisted entries are zero.
        a: Homotopy vector a (single value is broadcast). Default all ones.
        b: Homotopy vector b (single value is broadcast). Default all ones.
        beta: Estimate of beta(A) enabling the divergence guard.
        include_trace: Include per-step records.

    Returns:
        Dict with solution, y, residue, itr, nwtitr, status, config and
        optionally trace.
    """
    tcp = _load(problem)
    cfg = _config(settings, tcp, a, b, beta)
    start = time.perf_counter()
    result = trace(tcp, cfg)
    report = RunReport.from_result(
        result, cfg.echo(), include_trace, time.perf_counter() - start
    )

    warnings: list[str] = []
    if not result.converged:
        warnings.append(
            f"Tracing ended with status '{result.status.value}'; "
            "retry with a slightly perturbed b"
        )
    return _build_response(report.model_dump(exclude_none=True), warnings)


@mcp.tool()
def check_structure(
    problem: dict[str, Any],
    samples: int | None = None,
    seed: int | None = None,
    settings: Settings = Depends(get_settings),
) -> Response:
    """Estimate beta(A) and sample the structure properties of the tensor.

    Args:
        problem: Problem in file schema.
        samples: Random vectors (or pairs) per property. Default from settings.
        seed: Random seed. Default from settings.

    Returns:
        Dict with beta_estimate, beta_argmin and one pass/fail entry per
        property (ssp, p_function, p0_function, monotone) with a witness on
        failure.

    Notes:
        A failure is a certificate; a pass is only evidence.
    """
    tcp = _load(problem)
    report = structure_report(
        tcp.tensor,
        tcp.q,
        samples=samples if samples is not None else settings.samples,
        seed=seed if seed is not None else settings.seed,
        grid_per_axis=settings.grid_per_axis,
        refine_iters=settings.refine_iters,
    )
    return _build_response(dataclasses.asdict(report))


@mcp.tool()
def verify(
    problem: dict[str, Any],
    settings: Settings = Depends(get_settings),
) -> Response:
    """Cross-check the homotopy solution against brute-force enumeration.

    Args:
        problem: Problem in file schema with n <= 3.

    Returns:
        Dict with agree, unique, max_deviation, tracer report and all
        brute-force solutions.
    """
    tcp = _load(problem)
    report = verify_problem(tcp, settings.tracer_config(tcp.dim), settings)
    warnings: list[str] = []
    if not report["unique"]:
        warnings.append(f"{len(report['oracle_solutions'])} solutions found")
    return _build_response(report, warnings)


@mcp.tool()
def reproduce_table(
    example: str,
    q: list[float] | None = None,
    settings: Settings = Depends(get_settings),
) -> Response:
    """Re-run the reference rows of a built-in example.

    Args:
        example: Example key (order3-strong-ssp, order4-p-tensor,
            order5-diagonal, order3-ssp-non-p0).
        q: Run only the row with this q vector. Default: all six rows.

    Returns:
        Dict with one entry per row (computed and reference itr, nwtitr,
        solution and residue, plus the inf-norm deviation of the solutions)
        and the number of rows within tolerance.
    """
    ex = get_example(example)
    rows = [ex.row(q)] if q is not None else list(ex.rows)
    results = [run_reference_row(ex, row, settings) for row in rows]

    entries = [
        {
            "q": list(res.row.q),
            "status": res.result.status.value,
            "itr": res.result.itr,
            "nwtitr": res.result.nwtitr,
            "solution": res.result.solution.x.tolist(),
            "residue": res.result.residue,
            "reference": dataclasses.asdict(res.row),
            "deviation": res.deviation,
            "ok": res.ok,
        }
        for res in results
    ]
    failed = [entry["q"] for entry in entries if not entry["ok"]]
    warnings = [f"Row q={q_row} deviates from the reference" for q_row in failed]
    return _build_response(
        {
            "example": ex.key,
            "title": ex.title,
            "rows": entries,
            "passed": len(entries) - len(failed),
        },
        warnings,
    )


def main() -> None:
    """Entry point for the MCP server."""
    mcp.run()


if __name__ == "__main__":
    main()
