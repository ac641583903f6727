"""Built-in example problems with reference results.

Each example carries six reference rows: the q vector, the published step
and Newton counts, the solution to four decimals and the residue.
"""

from dataclasses import dataclass

import numpy as np

from tcp_homotopy.model import TcpProblem
from tcp_homotopy.tensor import DenseTensor


@dataclass(frozen=True)
class ReferenceRow:
    """Published outcome for one q vector."""

    q: tuple[float, ...]
    itr: int
    nwtitr: int
    solution: tuple[float, ...]
    residue: float


@dataclass(frozen=True)
class BuiltinExample:
    """A named tensor with its reference rows."""

    key: str
    title: str
    tensor: DenseTensor
    rows: tuple[ReferenceRow, ...]
    strong_ssp: bool

    def problem(self, q: tuple[float, ...] | list[float]) -> TcpProblem:
        """Problem with this tensor and the given q."""
        return TcpProblem(self.tensor, np.asarray(q, dtype=np.float64))

    def row(self, q: tuple[float, ...] | list[float]) -> ReferenceRow:
        """Reference row for ``q``.

        Raises:
            KeyError: If there is no row for ``q``.
        """
        key = tuple(float(v) for v in q)
        for row in self.rows:
            if row.q == key:
                return row
        raise KeyError(f"No reference row for q={list(key)} in {self.key}")


def _row(
    q: tuple[float, ...],
    itr: int,
    nwtitr: int,
    solution: tuple[float, ...],
    residue: float,
) -> ReferenceRow:
    return ReferenceRow(
        tuple(float(v) for v in q),
        itr,
        nwtitr,
        tuple(float(v) for v in solution),
        residue,
    )


ORDER3_STRONG_SSP = BuiltinExample(
    key="order3-strong-ssp",
    title="Order 3, dimension 2, strong strictly semi-positive",
    tensor=DenseTensor.from_entries(
        3,
        2,
        [
            ((1, 1, 1), 1.0),
            ((1, 2, 1), 1.0),
            ((1, 2, 2), -1.0),
            ((2, 2, 2), 1.0),
            ((2, 1, 1), -1.0),
            ((2, 2, 1), 1.0),
        ],
    ),
    rows=(
        _row((-5, -3), 5, 12, (2.1286, 1.8792), 8.8805e-15),
        _row((-5, 3), 5, 14, (2.0582, 0.4859), 2.6746e-23),
        _row((5, 3), 5, 12, (0, 0), 4.2730e-13),
        _row((0, 3), 5, 36, (0, 0), 6.8709e-13),
        _row((2, -3), 5, 13, (0.3103, 1.6113), 8.9179e-16),
        _row((0, -5), 5, 12, (1.2430, 2.0112), 2.1817e-15),
    ),
    strong_ssp=True,
)

ORDER4_P_TENSOR = BuiltinExample(
    key="order4-p-tensor",
    title=(
        "Order 4, dimension 2, P tensor (not strong P), "
        "strong strictly semi-positive"
    ),
    tensor=DenseTensor.from_entries(
        4,
        2,
        [
            ((1, 1, 1, 1), 1.0),
            ((1, 2, 2, 2), -1.0),
            ((1, 1, 2, 2), 1.0),
            ((2, 2, 2, 2), 1.0),
            ((2, 1, 1, 1), -1.0),
            ((2, 2, 1, 1), 1.0),
        ],
    ),
    rows=(
        _row((-5, -3), 5, 13, (1.6678, 1.5096), 1.1586e-14),
        _row((-5, 3), 5, 14, (1.6714, 0.5409), 1.9860e-15),
        _row((5, 3), 5, 12, (0, 0), 1.0731e-18),
        _row((0, 3), 5, 33, (0, 0), 5.2577e-13),
        _row((2, -3), 5, 13, (0.3906, 1.4167), 6.2804e-16),
        _row((0, -5), 5, 13, (1.1143, 1.6331), 3.8998e-15),
    ),
    strong_ssp=True,
)

ORDER5_DIAGONAL = BuiltinExample(
    key="order5-diagonal",
    title="Order 5, dimension 3, diagonal with entries 1, 2, 3",
    tensor=DenseTensor.from_entries(
        5, 3, [((k,) * 5, float(k)) for k in (1, 2, 3)]
    ),
    rows=(
        _row((1, 2, 3), 5, 12, (0, 0, 0), 4.0969e-21),
        _row((1, -2, 3), 5, 12, (0, 1, 0), 7.6027e-23),
        _row((-3, -2, -3), 5, 11, (1.3161, 1, 1), 3.6186e-15),
        _row((3, 3, 3), 5, 12, (0, 0, 0), 4.9693e-23),
        _row((-3, -1, -2), 5, 11, (1.3161, 0.8409, 0.9036), 3.6748e-15),
        _row((0, -1, -2), 5, 31, (0, 0.8409, 0.9036), 7.1789e-13),
    ),
    strong_ssp=True,
)

ORDER3_SSP_NON_P0 = BuiltinExample(
    key="order3-ssp-non-p0",
    title="Order 3, dimension 2, strictly semi-positive, map not P0 or monotone",
    tensor=DenseTensor.from_entries(
        3,
        2,
        [
            ((1, 1, 1), 1.0),
            ((1, 2, 1), 2.0),
            ((1, 2, 2), 1.0),
            ((2, 2, 2), 1.0),
            ((2, 1, 1), -1.0),
            ((2, 2, 1), -1.0),
        ],
    ),
    rows=(
        _row((-5, -3), 5, 14, (0.3127, 1.9233), 1.2942e-15),
        _row((-5, 3), 5, 11, (1.5513, 0.6847), 1.7402e-14),
        _row((5, 3), 5, 13, (0, 0), 6.0454e-26),
        _row((0, 3), 5, 36, (0, 0), 6.3603e-13),
        _row((2, -3), 5, 13, (0, 1.7321), 9.9301e-16),
        _row((0, -5), 5, 15, (0, 2.2361), 1.9860e-15),
    ),
    strong_ssp=False,
)

EXAMPLES: dict[str, BuiltinExample] = {
    ex.key: ex
    for ex in (ORDER3_STRONG_SSP, ORDER4_P_TENSOR, ORDER5_DIAGONAL, ORDER3_SSP_NON_P0)
}

# Rows where the Jacobian is singular at the solution and the terminal
# corrector converges only linearly.
SINGULAR_ENDPOINT_ROWS: frozenset[tuple[str, tuple[float, ...]]] = frozenset(
    {
        ("order3-strong-ssp", (0.0, 3.0)),
        ("order4-p-tensor", (0.0, 3.0)),
        ("order3-ssp-non-p0", (0.0, 3.0)),
        ("order5-diagonal", (0.0, -1.0, -2.0)),
    }
)


def get_example(key: str) -> BuiltinExample:
    """Look up a built-in example.

    Raises:
        KeyError: With the list of known keys.
    """
    try:
        return EXAMPLES[key]
    except KeyError:
        known = ", ".join(EXAMPLES)
        raise KeyError(f"Unknown example '{key}'; known: {known}") from None


def all_rows() -> list[tuple[BuiltinExample, ReferenceRow]]:
    """Every (example, row) pair in a fixed order."""
    return [(ex, row) for ex in EXAMPLES.values() for row in ex.rows]
