"""Dense tensor storage and the multilinear kernels used by the solver.

A tensor of order ``m`` and dimension ``n`` holds ``n**m`` real entries in
row-major order over ``(i1, ..., im)``. Indices are 0-based here; 1-based
indices only appear at the file boundary (see ``problem_io``).
"""

import itertools
import math
from collections.abc import Iterable, Sequence
from functools import cached_property, lru_cache
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from tcp_homotopy.exceptions import ParameterError, ShapeError

FloatArray = NDArray[np.float64]


class DenseTensor:
    """Immutable order-m, dimension-n real tensor with flat storage."""

    def __init__(self, order: int, dim: int, values: ArrayLike) -> None:
        """Create a tensor from flat or cube-shaped values.

        Args:
            order: Tensor order m (>= 2).
            dim: Dimension n (>= 1).
            values: ``n**m`` entries, flat row-major or shaped ``(n,) * m``.

        Raises:
            ParameterError: If order or dim is out of range.
            ShapeError: If the number of values is not ``n**m``.
        """
        if order < 2:
            raise ParameterError(f"Tensor order must be >= 2, got {order}")
        if dim < 1:
            raise ParameterError(f"Tensor dimension must be >= 1, got {dim}")

        flat = np.array(values, dtype=np.float64).reshape(-1)
        if flat.size != dim**order:
            raise ShapeError(
                f"Expected {dim**order} values for order {order}, "
                f"dimension {dim}; got {flat.size}"
            )
        flat.flags.writeable = False

        self._order = order
        self._dim = dim
        self._values = flat

    @classmethod
    def zeros(cls, order: int, dim: int) -> "DenseTensor":
        """Create the zero tensor."""
        return cls(order, dim, np.zeros(dim**order))

    @classmethod
    def from_entries(
        cls,
        order: int,
        dim: int,
        entries: Iterable[tuple[Sequence[int], float]],
    ) -> "DenseTensor":
        """Create a tensor from sparse 1-based entries; unlisted entries are zero.

        Args:
            order: Tensor order m.
            dim: Dimension n.
            entries: Pairs of (1-based index tuple, value).

        Raises:
            ShapeError: If an index tuple has the wrong length or range.
            ParameterError: If an index tuple is listed twice.
        """
        cube = np.zeros((dim,) * order)
        seen: set[tuple[int, ...]] = set()
        for idx, value in entries:
            key = tuple(int(i) for i in idx)
            if len(key) != order:
                raise ShapeError(f"Index {key} must have {order} components")
            if any(i < 1 or i > dim for i in key):
                raise ShapeError(f"Index {key} out of range [1, {dim}]")
            if key in seen:
                raise ParameterError(f"Duplicate index {key}")
            seen.add(key)
            cube[tuple(i - 1 for i in key)] = value
        return cls(order, dim, cube)

    @property
    def order(self) -> int:
        """Tensor order m."""
        return self._order

    @property
    def dim(self) -> int:
        """Tensor dimension n."""
        return self._dim

    @property
    def values(self) -> FloatArray:
        """Read-only flat row-major entries."""
        return self._values

    @property
    def cube(self) -> FloatArray:
        """Read-only view shaped ``(n,) * m``."""
        return self._values.reshape((self._dim,) * self._order)

    @cached_property
    def semi_symmetric(self) -> "SemiSymmetricTensor":
        """Semi-symmetrized twin, computed once per tensor."""
        return semi_symmetrize(self)

    def entries(self) -> list[tuple[tuple[int, ...], float]]:
        """Nonzero entries with 1-based indices in lexicographic order."""
        result: list[tuple[tuple[int, ...], float]] = []
        for idx in itertools.product(range(self._dim), repeat=self._order):
            value = float(self.cube[idx])
            if value != 0.0:
                result.append((tuple(i + 1 for i in idx), value))
        return result

    def max_abs(self) -> float:
        """Largest absolute entry."""
        return float(np.max(np.abs(self._values)))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return (
            self._order == other._order
            and self._dim == other._dim
            and bool(np.array_equal(self._values, other._values))
        )

    def __hash__(self) -> int:
        return hash((self._order, self._dim, self._values.tobytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(order={self._order}, dim={self._dim})"


class SemiSymmetricTensor(DenseTensor):
    """Tensor invariant under permutations of its trailing m-1 indices."""

    @cached_property
    def semi_symmetric(self) -> "SemiSymmetricTensor":
        return self


@lru_cache(maxsize=64)
def _permutation_classes(
    dim: int, length: int
) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Group index tuples of the given length by their sorted multiset.

    Classes and their members are in lexicographic order.
    """
    classes: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for idx in itertools.product(range(dim), repeat=length):
        classes.setdefault(tuple(sorted(idx)), []).append(idx)
    return tuple(tuple(members) for members in classes.values())


def _as_vector(x: ArrayLike, dim: int) -> FloatArray:
    vec = np.asarray(x, dtype=np.float64)
    if vec.shape != (dim,):
        raise ShapeError(f"Expected vector of length {dim}, got shape {vec.shape}")
    return vec


def semi_symmetrize(tensor: DenseTensor) -> SemiSymmetricTensor:
    """Average entries over the distinct permutations of the trailing indices.

    Each permutation class is written once, so members compare equal exactly.
    Classes whose members already agree keep their value unchanged, which makes
    the operation idempotent bit for bit.

    Args:
        tensor: Any dense tensor.

    Returns:
        Semi-symmetric tensor inducing the same polynomial map.
    """
    if isinstance(tensor, SemiSymmetricTensor):
        return tensor

    n, m = tensor.dim, tensor.order
    cube = tensor.cube
    out = np.empty_like(cube)
    classes = _permutation_classes(n, m - 1)

    for lead in range(n):
        block = cube[lead]
        out_block = out[lead]
        for members in classes:
            vals = [float(block[idx]) for idx in members]
            first = vals[0]
            if all(v == first for v in vals):
                value = first
            else:
                value = math.fsum(vals) / len(vals)
            for idx in members:
                out_block[idx] = value

    return SemiSymmetricTensor(m, n, out)


def contract_to_vector(tensor: DenseTensor, x: ArrayLike) -> FloatArray:
    """Compute ``A x^(m-1)``, the vector of sums ``sum A[i, j2..jm] x[j2]..x[jm]``.

    Raises:
        ShapeError: If ``x`` does not have length n.
    """
    vec = _as_vector(x, tensor.dim)
    result = tensor.cube
    for _ in range(tensor.order - 1):
        result = result @ vec
    return np.asarray(result, dtype=np.float64)


def contract_to_matrix(tensor: DenseTensor, x: ArrayLike) -> FloatArray:
    """Compute ``A x^(m-2)``, the n-by-n matrix left after m-2 contractions.

    For order 2 this is the tensor's matrix itself, independent of ``x``.
    Pass the semi-symmetric twin to obtain the derivative factor.

    Raises:
        ShapeError: If ``x`` does not have length n.
    """
    vec = _as_vector(x, tensor.dim)
    result = tensor.cube
    for _ in range(tensor.order - 2):
        result = result @ vec
    return np.array(result, dtype=np.float64)


def jacobian_of_map(tensor: DenseTensor, x: ArrayLike) -> FloatArray:
    """Jacobian of ``x -> A x^(m-1)``, equal to ``(m-1) * Ahat x^(m-2)``.

    Raises:
        ShapeError: If ``x`` does not have length n.
    """
    return (tensor.order - 1) * contract_to_matrix(tensor.semi_symmetric, x)
