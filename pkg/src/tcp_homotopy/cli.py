"""Command-line entry point.

Subcommands:
    solve    Trace the homotopy for a problem file and print a JSON report.
    tables   Re-run the built-in examples and compare with the reference rows.
    check    Estimate beta(A) and run the sampled structure checks.
    verify   Cross-check the tracer against the brute-force solver (n <= 3).
    export   Write a built-in example as a problem file.
"""

import argparse
import dataclasses
import json
import logging
import sys
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np

from tcp_homotopy.diagnostics import estimate_beta, structure_report
from tcp_homotopy.examples import EXAMPLES, BuiltinExample, ReferenceRow, get_example
from tcp_homotopy.exceptions import TcpError
from tcp_homotopy.model import TcpProblem
from tcp_homotopy.oracle import solve_brute_force
from tcp_homotopy.problem_io import RunReport, dump_problem, load_problem
from tcp_homotopy.settings import Settings, get_settings
from tcp_homotopy.tracer import TracerConfig, TraceResult, TraceStatus, trace

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_STALLED = 2
EXIT_GUARD = 3
EXIT_INPUT = 4

STATUS_EXIT_CODES = {
    TraceStatus.CONVERGED: EXIT_OK,
    TraceStatus.STALLED: EXIT_STALLED,
    TraceStatus.MAX_STEPS: EXIT_STALLED,
    TraceStatus.GUARD_TRIPPED: EXIT_GUARD,
}

TABLE_TOLERANCE = 1e-3
AGREEMENT_TOLERANCE = 1e-4


def _vector(text: str) -> list[float]:
    """Parse ``"1,2,3"`` (or a single scalar for broadcasting)."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Not a comma-separated vector: {text}") from e


def _add_tracer_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("tracer")
    group.add_argument("--a", type=_vector, help="vector a or scalar (default 1)")
    group.add_argument("--b", type=_vector, help="vector b or scalar (default 1)")
    group.add_argument(
        "--relaxed", action="store_true", help="allow a >= 0 (experimental)"
    )
    group.add_argument("--perturb-b", type=int, metavar="SEED",
                       help="scale b entrywise by uniform [0.9, 1.1] factors")
    group.add_argument("--dt0", type=float)
    group.add_argument("--eps1", type=float)
    group.add_argument("--eps2", type=float)
    group.add_argument("--max-steps", type=int)
    group.add_argument("--guard-radius", type=float,
                       help="trip when ||x||_inf exceeds this (no beta given)")
    group.add_argument("--beta", metavar="VALUE|auto",
                       help="beta(A) for the divergence guard; 'auto' estimates it")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcp-homotopy",
        description="Homotopy continuation solver for tensor complementarity problems",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve a problem file")
    solve.add_argument("problem", type=Path)
    _add_tracer_flags(solve)
    solve.add_argument("--trace", action="store_true", help="include per-step records")
    solve.add_argument("--out", type=Path, help="write the JSON report here")
    solve.add_argument("--echo-config", action="store_true",
                       help="print the effective configuration and exit")

    tables = sub.add_parser("tables", help="reproduce the reference tables")
    tables.add_argument("--example", choices=sorted(EXAMPLES), help="only this example")
    tables.add_argument("--jobs", type=int, default=1, help="rows run in parallel")

    check = sub.add_parser("check", help="structure diagnostics for a problem file")
    check.add_argument("problem", type=Path)
    check.add_argument("--seed", type=int)
    check.add_argument("--samples", type=int)
    check.add_argument("--grid", type=int, help="grid points per axis for beta")
    check.add_argument("--refine", type=int, help="coordinate-descent sweeps for beta")

    verify = sub.add_parser("verify", help="compare tracer and brute force (n <= 3)")
    verify.add_argument("problem", type=Path)
    _add_tracer_flags(verify)
    verify.add_argument("--starts", type=int, help="Newton starts per axis and support")

    export = sub.add_parser("export", help="write a built-in example as a problem file")
    export.add_argument("example", choices=sorted(EXAMPLES))
    export.add_argument("--q", type=_vector, required=True)
    export.add_argument("--out", type=Path)

    return parser


def _configure_logging(settings: Settings, verbose: bool) -> None:
    level = (
        logging.DEBUG
        if verbose
        else getattr(logging, settings.log_level.upper(), logging.WARNING)
    )
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _tracer_config(
    args: argparse.Namespace, settings: Settings, problem: TcpProblem
) -> TracerConfig:
    cfg = settings.tracer_config(
        problem.dim,
        a=args.a,
        b=args.b,
        relaxed=args.relaxed,
        dt0=args.dt0,
        eps1=args.eps1,
        eps2=args.eps2,
        max_steps=args.max_steps,
    )
    if args.perturb_b is not None:
        cfg = dataclasses.replace(cfg, params=cfg.params.perturbed(args.perturb_b))
    beta: float | None = None
    if args.beta == "auto":
        beta, _ = estimate_beta(
            problem.tensor, settings.grid_per_axis, settings.refine_iters
        )
    elif args.beta is not None:
        beta = float(args.beta)
    return dataclasses.replace(cfg, guard_radius=args.guard_radius, beta_estimate=beta)


def _write_json(payload: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(payload + "\n")
    else:
        out.write_text(payload + "\n", encoding="utf-8")


def _suggest_perturbation(result: TraceResult) -> None:
    if result.status in (TraceStatus.STALLED, TraceStatus.MAX_STEPS):
        print(
            "Tracing did not reach t=0; b may be non-generic. "
            "Retry with --perturb-b SEED to use a randomly perturbed b.",
            file=sys.stderr,
        )


def cmd_solve(args: argparse.Namespace, settings: Settings) -> int:
    """Solve a problem file and emit a RunReport."""
    problem = load_problem(args.problem)
    cfg = _tracer_config(args, settings, problem)
    if args.echo_config:
        _write_json(json.dumps(cfg.echo(), indent=2), None)
        return EXIT_OK

    start = time.perf_counter()
    result = trace(problem, cfg)
    elapsed = time.perf_counter() - start

    report = RunReport.from_result(result, cfg.echo(), args.trace, elapsed)
    _write_json(report.model_dump_json(indent=2, exclude_none=True), args.out)
    print(report.summary(), file=sys.stderr)
    _suggest_perturbation(result)
    return STATUS_EXIT_CODES[result.status]


@dataclasses.dataclass
class TableRowResult:
    """Outcome of one reference row."""

    example: BuiltinExample
    row: ReferenceRow
    result: TraceResult

    @property
    def deviation(self) -> float:
        expected = np.asarray(self.row.solution)
        return float(np.max(np.abs(self.result.solution.x - expected)))

    @property
    def ok(self) -> bool:
        return self.result.converged and self.deviation <= TABLE_TOLERANCE


def run_reference_row(
    example: BuiltinExample, row: ReferenceRow, settings: Settings
) -> TableRowResult:
    """Trace one reference row with the default configuration."""
    problem = example.problem(row.q)
    cfg = settings.tracer_config(problem.dim)
    return TableRowResult(example, row, trace(problem, cfg))


def _format_vector(values: Sequence[float]) -> str:
    return "[" + ", ".join(f"{v:.4f}" for v in values) + "]"


def cmd_tables(args: argparse.Namespace, settings: Settings) -> int:
    """Run every reference row and print a comparison table."""
    examples = [get_example(args.example)] if args.example else list(EXAMPLES.values())
    jobs = [(ex, row) for ex in examples for row in ex.rows]

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda job: run_reference_row(*job, settings), jobs))

    failures = 0
    current: str | None = None
    for res in results:
        if res.example.key != current:
            current = res.example.key
            print(f"\n{res.example.key}: {res.example.title}")
            print(
                f"  {'q':<16}{'itr':>5}{'nwtitr':>8}  "
                f"{'solution':<28}{'residue':>12}  ok"
            )
        status = res.result.status.value
        mark = "yes" if res.ok else f"NO (dev={res.deviation:.2e}, {status})"
        failures += 0 if res.ok else 1
        print(
            f"  {_format_vector(res.row.q):<16}"
            f"{res.result.itr:>5}{res.result.nwtitr:>8}  "
            f"{_format_vector(res.result.solution.x.tolist()):<28}"
            f"{res.result.residue:>12.4e}  {mark}"
        )

    print(f"\n{len(results) - failures}/{len(results)} rows within {TABLE_TOLERANCE:g}")
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILED


def cmd_check(args: argparse.Namespace, settings: Settings) -> int:
    """Emit a StructureReport as JSON."""
    problem = load_problem(args.problem)
    report = structure_report(
        problem.tensor,
        problem.q,
        samples=args.samples if args.samples is not None else settings.samples,
        seed=args.seed if args.seed is not None else settings.seed,
        grid_per_axis=args.grid if args.grid is not None else settings.grid_per_axis,
        refine_iters=args.refine if args.refine is not None else settings.refine_iters,
    )
    _write_json(json.dumps(dataclasses.asdict(report), indent=2), None)
    return EXIT_OK


def verify_problem(
    problem: TcpProblem,
    cfg: TracerConfig,
    settings: Settings,
    starts: int | None = None,
) -> dict[str, Any]:
    """Trace the problem, solve it by brute force, and compare.

    Raises:
        UnsupportedSizeError: If the dimension exceeds 3.
    """
    oracle = solve_brute_force(
        problem,
        tol=settings.oracle_tol,
        starts_per_support=starts if starts is not None else settings.oracle_starts,
    )
    result = trace(problem, cfg)
    report = RunReport.from_result(result, cfg.echo())
    deviations = [
        float(np.max(np.abs(result.solution.x - pair.x))) for pair in oracle
    ]
    best = min(deviations) if deviations else float("inf")
    return {
        "agree": result.converged and best <= AGREEMENT_TOLERANCE,
        "unique": len(oracle) == 1,
        "max_deviation": best if deviations else None,
        "tracer": report.model_dump(exclude_none=True),
        "oracle_solutions": [pair.x.tolist() for pair in oracle],
    }


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    """Compare the tracer with the brute-force solver."""
    problem = load_problem(args.problem)
    cfg = _tracer_config(args, settings, problem)
    report = verify_problem(problem, cfg, settings, args.starts)
    _write_json(json.dumps(report, indent=2), None)
    if not report["unique"]:
        print(
            f"Brute force found {len(report['oracle_solutions'])} solutions",
            file=sys.stderr,
        )
    return EXIT_OK if report["agree"] else EXIT_CHECK_FAILED


def cmd_export(args: argparse.Namespace, settings: Settings) -> int:
    """Write a built-in example with the given q as a problem file."""
    problem = get_example(args.example).problem(args.q)
    _write_json(dump_problem(problem), args.out)
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "tables": cmd_tables,
    "check": cmd_check,
    "verify": cmd_verify,
    "export": cmd_export,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point for the command line."""
    args = _build_parser().parse_args(argv)
    settings = get_settings()
    _configure_logging(settings, args.verbose)

    try:
        return COMMANDS[args.command](args, settings)
    except (TcpError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
