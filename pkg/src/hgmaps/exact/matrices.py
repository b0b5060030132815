"""Exact dense matrices with kernel and rank over the Gaussian rationals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from sympy.polys.matrices import DomainMatrix

from .polynomials import K, _coerce_scalar
from .scalars import ONE, ZERO, GaussianRational

Vector = tuple[GaussianRational, ...]


@dataclass(frozen=True, slots=True)
class ExactMatrix:
    rows: int
    cols: int
    entries: tuple[Vector, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.entries)}")
        for index, row in enumerate(self.entries):
            if len(row) != self.cols:
                raise ValueError(f"row {index} has {len(row)} entries, expected {self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[GaussianRational | int]], cols: int | None = None) -> "ExactMatrix":
        entries = tuple(tuple(_coerce_scalar(value) for value in row) for row in rows)
        width = cols if cols is not None else (len(entries[0]) if entries else 0)
        return cls(len(entries), width, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[GaussianRational | int]], rows: int) -> "ExactMatrix":
        for index, column in enumerate(columns):
            if len(column) != rows:
                raise ValueError(f"column {index} has {len(column)} entries, expected {rows}")
        entries = tuple(
            tuple(_coerce_scalar(column[r]) for column in columns) for r in range(rows)
        )
        return cls(rows, len(columns), entries)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, tuple((ZERO,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, size: int) -> "ExactMatrix":
        return cls(
            size,
            size,
            tuple(tuple(ONE if r == c else ZERO for c in range(size)) for r in range(size)),
        )

    def to_domain_matrix(self) -> DomainMatrix:
        return DomainMatrix([list(row) for row in self.entries], (self.rows, self.cols), K)

    def apply(self, vector: Sequence[GaussianRational]) -> Vector:
        """Matrix-vector product ``M v``."""

        if len(vector) != self.cols:
            raise ValueError("vector length does not match the column count")
        result = []
        for row in self.entries:
            total = ZERO
            for value, component in zip(row, vector):
                if value and component:
                    total += value * component
            result.append(total)
        return tuple(result)

    def inverse(self) -> "ExactMatrix":
        if self.rows != self.cols:
            raise ValueError("only square matrices have inverses")
        if exact_rank(self) != self.rows:
            raise ValueError("matrix is singular")
        return ExactMatrix.from_rows(self.to_domain_matrix().inv().to_list(), self.cols)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("inner dimensions do not match")
        product = self.to_domain_matrix().matmul(other.to_domain_matrix())
        return ExactMatrix.from_rows(product.to_list(), other.cols)

    def rank(self) -> int:
        return exact_rank(self)

    def kernel(self) -> list[Vector]:
        return exact_kernel(self)


def _rref(matrix: ExactMatrix) -> tuple[list[list[GaussianRational]], tuple[int, ...]]:
    reduced, pivots = matrix.to_domain_matrix().rref()
    return reduced.to_list(), tuple(pivots)


def exact_rank(matrix: ExactMatrix) -> int:
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    return len(_rref(matrix)[1])


def exact_kernel(matrix: ExactMatrix) -> list[Vector]:
    """Basis of ``ker M`` in reduced row echelon form (leading entry 1)."""

    if matrix.cols == 0:
        return []
    if matrix.rows == 0:
        return list(ExactMatrix.identity(matrix.cols).entries)
    rows, pivots = _rref(matrix)
    free = [c for c in range(matrix.cols) if c not in pivots]
    if not free:
        return []
    basis: list[list[GaussianRational]] = []
    for column in free:
        vector = [ZERO] * matrix.cols
        vector[column] = ONE
        for row_index, pivot in enumerate(pivots):
            vector[pivot] = -rows[row_index][column]
        basis.append(vector)
    canonical, _ = _rref(ExactMatrix.from_rows(basis, matrix.cols))
    return [tuple(row) for row in canonical[: len(basis)]]


__all__ = ["ExactMatrix", "Vector", "exact_kernel", "exact_rank"]
