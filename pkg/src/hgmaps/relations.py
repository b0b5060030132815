"""Relation spaces ``I_k(L)``: kernels of the multiplication map on symmetric powers."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from typing import Any, Iterable, Mapping, Sequence

from .contract import Backend, BackendError
from .exact.scalars import GaussianRational, Scalar, format_scalar, ratio

LOGGER = logging.getLogger(__name__)

Multiset = tuple[int, ...]


class RelationSpaceEmptyError(RuntimeError):
    """Raised when a relation is requested from a zero relation space."""


def multisets(size: int, degree: int) -> list[Multiset]:
    """Sorted multisets of ``degree`` indices from ``range(size)`` in lexicographic order."""

    return list(combinations_with_replacement(range(size), degree))


def exponents(multiset: Sequence[int], size: int) -> tuple[int, ...]:
    counts = Counter(multiset)
    return tuple(counts.get(index, 0) for index in range(size))


def orderings(multiset: Sequence[int]) -> int:
    """Number of distinct orderings of ``multiset`` (the multinomial coefficient)."""

    total = math.factorial(len(multiset))
    for count in Counter(multiset).values():
        total //= math.factorial(count)
    return total


def _divide(value: Scalar, divisor: int, exact: bool) -> Scalar:
    if exact:
        return value * ratio(1, divisor)
    return value / divisor


@dataclass(frozen=True, slots=True)
class SymmetricTensor:
    """Fully symmetric tensor ``a_J`` stored by its monomial coefficients.

    ``terms`` holds ``(M, c_M)`` for the sorted multisets ``M`` with nonzero
    coefficient, where ``c_M`` multiplies the monomial ``x^M``. The tensor
    entries follow the weight convention ``a_J = c_M / #orderings(M)``, so
    ``x0*x2 - x1^2`` has ``a_02 = a_20 = 1/2`` and ``a_11 = -1``.
    """

    degree: int
    size: int
    terms: tuple[tuple[Multiset, Scalar], ...]
    exact: bool

    @classmethod
    def from_coefficients(
        cls,
        degree: int,
        size: int,
        coefficients: Mapping[Sequence[int], Scalar],
        *,
        exact: bool,
    ) -> "SymmetricTensor":
        merged: dict[Multiset, Scalar] = {}
        for key, value in coefficients.items():
            multiset = tuple(sorted(key))
            if len(multiset) != degree or any(not 0 <= i < size for i in multiset):
                raise ValueError(f"monomial {key} does not fit degree {degree} over {size} sections")
            merged[multiset] = merged[multiset] + value if multiset in merged else value
        terms = tuple((key, merged[key]) for key in sorted(merged) if _nonzero(merged[key]))
        return cls(degree=degree, size=size, terms=terms, exact=exact)

    @classmethod
    def from_entries(
        cls,
        degree: int,
        size: int,
        entries: Mapping[Sequence[int], Scalar],
        *,
        exact: bool,
    ) -> "SymmetricTensor":
        """Symmetrize a tensor given entry by entry (``a_J`` for ordered ``J``)."""

        coefficients: dict[Multiset, Scalar] = {}
        for key, value in entries.items():
            multiset = tuple(sorted(key))
            coefficients[multiset] = coefficients[multiset] + value if multiset in coefficients else value
        return cls.from_coefficients(degree, size, coefficients, exact=exact)

    @classmethod
    def zero(cls, degree: int, size: int, *, exact: bool) -> "SymmetricTensor":
        return cls(degree=degree, size=size, terms=(), exact=exact)

    def coefficients(self) -> dict[Multiset, Scalar]:
        return dict(self.terms)

    def coefficient(self, multiset: Sequence[int]) -> Scalar | None:
        return self.coefficients().get(tuple(sorted(multiset)))

    def entry(self, indices: Sequence[int]) -> Scalar:
        """The tensor entry ``a_J`` for an ordered index tuple ``J``."""

        multiset = tuple(sorted(indices))
        value = self.coefficients().get(multiset)
        if value is None:
            return _zero(self.exact)
        return _divide(value, orderings(multiset), self.exact)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "SymmetricTensor") -> "SymmetricTensor":
        if (self.degree, self.size) != (other.degree, other.size):
            raise ValueError("tensors of different shape")
        merged = self.coefficients()
        for key, value in other.terms:
            merged[key] = merged[key] + value if key in merged else value
        return SymmetricTensor.from_coefficients(
            self.degree, self.size, merged, exact=self.exact and other.exact
        )

    def scale(self, factor: Scalar) -> "SymmetricTensor":
        return SymmetricTensor.from_coefficients(
            self.degree,
            self.size,
            {key: value * factor for key, value in self.terms},
            exact=self.exact,
        )

    def change_basis(self, transform: Sequence[Sequence[Scalar]]) -> "SymmetricTensor":
        """Rewrite the relation in a new section basis.

        ``transform[j][i]`` is the coefficient of the new section ``i`` in the
        old section ``j``, so ``λ_j = Σ_i transform[j][i] λ'_i``.
        """

        new_size = len(transform[0]) if transform else 0
        if len(transform) != self.size:
            raise ValueError("transform must have one row per old section")
        expanded: dict[Multiset, Scalar] = {}
        for multiset, value in self.terms:
            # x^M = Π_t (Σ_i T[j_t][i] y_i): expand the product term by term.
            for choice in product(range(new_size), repeat=self.degree):
                weight = value
                for old, new in zip(multiset, choice):
                    factor = transform[old][new]
                    if not _nonzero(factor):
                        weight = None
                        break
                    weight = weight * factor
                if weight is None:
                    continue
                key = tuple(sorted(choice))
                expanded[key] = expanded[key] + weight if key in expanded else weight
        return SymmetricTensor.from_coefficients(self.degree, new_size, expanded, exact=self.exact)

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "size": self.size,
            "terms": [
                {"monomial": list(key), "coefficient": format_scalar(value)} for key, value in self.terms
            ],
        }

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for key, value in self.terms:
            monomial = "*".join(
                f"x{index}" if power == 1 else f"x{index}^{power}"
                for index, power in sorted(Counter(key).items())
            )
            pieces.append(f"({format_scalar(value)})*{monomial}")
        return " + ".join(pieces)


def _nonzero(value: Any) -> bool:
    if value is None:
        return False
    if isinstance(value, GaussianRational):
        return bool(value)
    return abs(value) != 0.0


def _zero(exact: bool) -> Scalar:
    return ratio(0, 1) if exact else 0j


@dataclass(slots=True)
class RelationSpace:
    """Basis of ``I_k(L)`` with the provenance of the multiplication matrix."""

    degree: int
    size: int
    basis: list[SymmetricTensor]
    exact: bool
    provenance: dict[str, Any] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def element(self, index: int) -> SymmetricTensor:
        if not self.basis:
            raise RelationSpaceEmptyError("relation space is zero")
        if not 0 <= index < len(self.basis):
            raise ValueError(f"relation index {index} outside 0..{len(self.basis) - 1}")
        return self.basis[index]

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.degree,
            "sections": self.size,
            "dimension": self.dimension,
            "exact": self.exact,
            "provenance": dict(self.provenance),
            "basis": [tensor.to_dict() for tensor in self.basis],
        }


def relation_space(backend: Backend, k: int) -> RelationSpace:
    """Kernel of ``Sym^k H^0(L) -> H^0(L^k)`` in the symmetrized monomial basis."""

    if k < 1:
        raise ValueError("relation degree k must be at least 1")
    size = backend.rank
    if size < 1:
        raise ValueError("h^0(L) must be at least 1")
    monomials = multisets(size, k)
    columns = [backend.multiplication_column(monomial) for monomial in monomials]
    rows = backend.target_dimension(k)
    result = backend.relation_kernel(columns, rows)
    basis = [
        SymmetricTensor.from_coefficients(
            k, size, dict(zip(monomials, vector)), exact=backend.exact
        )
        for vector in result.vectors
    ]
    for index, tensor in enumerate(basis):
        residual = backend.relation_residual(tensor.coefficients())
        LOGGER.debug("Relation %d identity residual %.3e", index, residual)
        if residual > backend.tolerances.identity:
            raise BackendError(
                f"relation {index} violates Σ a_J λ_J = 0 (residual {residual:.3e})"
            )
    LOGGER.info(
        "I_%d on %s (degree %d): %dx%d multiplication matrix, rank %d, dimension %d",
        k,
        backend.name,
        backend.degree,
        rows,
        len(monomials),
        result.rank,
        len(basis),
    )
    provenance = {
        "backend": backend.name,
        "rows": rows,
        "cols": len(monomials),
        "rank": result.rank,
        "gap": result.gap,
    }
    return RelationSpace(degree=k, size=size, basis=basis, exact=backend.exact, provenance=provenance)


def symmetric_relation(
    backend: Backend, coefficients: Mapping[Sequence[int], Scalar], k: int = 2
) -> SymmetricTensor:
    return SymmetricTensor.from_coefficients(k, backend.rank, coefficients, exact=backend.exact)


def combine(basis: Iterable[SymmetricTensor], weights: Iterable[Scalar]) -> SymmetricTensor:
    total: SymmetricTensor | None = None
    for tensor, weight in zip(basis, weights):
        term = tensor.scale(weight)
        total = term if total is None else total + term
    if total is None:
        raise RelationSpaceEmptyError("relation space is zero")
    return total


__all__ = [
    "Multiset",
    "RelationSpace",
    "RelationSpaceEmptyError",
    "SymmetricTensor",
    "combine",
    "exponents",
    "multisets",
    "orderings",
    "relation_space",
    "symmetric_relation",
]
