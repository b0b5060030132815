"""Second module of relations ``R_2(E, F)`` for split bundles on the projective line."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

from .contract import GaussImage
from .exact.matrices import ExactMatrix, exact_kernel, exact_rank
from .exact.polynomials import Polynomial, RationalFunction
from .exact.scalars import ZERO, GaussianRational, format_gaussian
from .p1 import BumpForm, P1Backend, harmonic_decompose_p1
from .relations import SymmetricTensor

LOGGER = logging.getLogger(__name__)

Unknown = tuple[int, int, int, int]


@dataclass(frozen=True, slots=True)
class SplitBundle:
    """``O(d_0) ⊕ ... ⊕ O(d_s)`` on the projective line."""

    degrees: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.degrees:
            raise ValueError("a split bundle needs at least one summand")
        if any(d < 0 for d in self.degrees):
            raise ValueError(f"summand degrees must be non-negative, got {self.degrees}")

    @classmethod
    def parse(cls, text: str) -> "SplitBundle":
        try:
            return cls(tuple(int(part) for part in text.split(",") if part.strip()))
        except ValueError as exc:
            raise ValueError(f"split type {text!r} must be comma-separated integers") from exc

    def h0(self) -> int:
        return sum(d + 1 for d in self.degrees)

    def sections(self) -> list[tuple[int, int]]:
        """Basis ``(summand, power)`` meaning ``z^power`` in summand ``summand``."""

        return [(i, p) for i, d in enumerate(self.degrees) for p in range(d + 1)]

    def __str__(self) -> str:
        return " + ".join(f"O({d})" for d in self.degrees)


def _unknowns(e: SplitBundle, f: SplitBundle) -> list[Unknown]:
    return [(i, p, j, q) for i, p in e.sections() for j, q in f.sections()]


def jet_matrix(e: SplitBundle, f: SplitBundle) -> ExactMatrix:
    """2-jet evaluation of ``Σ a x^p y^q`` along the diagonal, block by block.

    For each summand pair the rows are the coefficients of ``G(z, z)`` followed
    by those of ``∂_x G(z, z) = Σ p a z^{p+q-1}``.
    """

    unknowns = _unknowns(e, f)
    position = {u: c for c, u in enumerate(unknowns)}
    rows: list[list[GaussianRational]] = []
    for i, a in enumerate(e.degrees):
        for j, b in enumerate(f.degrees):
            values = [[ZERO] * len(unknowns) for _ in range(a + b + 1)]
            slopes = [[ZERO] * len(unknowns) for _ in range(max(a + b, 0))]
            for p in range(a + 1):
                for q in range(b + 1):
                    column = position[(i, p, j, q)]
                    values[p + q][column] = values[p + q][column] + 1
                    if p:
                        slopes[p + q - 1][column] = slopes[p + q - 1][column] + p
            rows.extend(values)
            rows.extend(slopes)
    return ExactMatrix.from_rows(rows, len(unknowns))


@dataclass(frozen=True, slots=True)
class PairTensor:
    """``Σ a_{(i,p),(j,q)} (z^p in E_i) ⊗ (z^q in F_j)``."""

    source: SplitBundle
    target: SplitBundle
    entries: tuple[tuple[Unknown, GaussianRational], ...]

    @classmethod
    def from_vector(
        cls, source: SplitBundle, target: SplitBundle, vector: Sequence[GaussianRational]
    ) -> "PairTensor":
        unknowns = _unknowns(source, target)
        return cls(source, target, tuple((u, v) for u, v in zip(unknowns, vector) if v))

    @classmethod
    def from_symmetric(cls, tensor: SymmetricTensor) -> "PairTensor":
        """Embed ``Q ∈ I_2(O(d))`` into ``R_2(O(d), O(d))`` through its symmetric entries."""

        if tensor.degree != 2:
            raise ValueError("only quadrics embed into R_2")
        bundle = SplitBundle((tensor.size - 1,))
        entries = []
        for p in range(tensor.size):
            for q in range(tensor.size):
                value = tensor.entry((p, q))
                if value:
                    entries.append(((0, p, 0, q), value))
        return cls(bundle, bundle, tuple(entries))

    def vector(self) -> list[GaussianRational]:
        lookup = dict(self.entries)
        return [lookup.get(u, ZERO) for u in _unknowns(self.source, self.target)]

    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other: "PairTensor") -> "PairTensor":
        return PairTensor.from_vector(
            self.source, self.target, [a + b for a, b in zip(self.vector(), other.vector())]
        )

    def scale(self, factor: GaussianRational) -> "PairTensor":
        return PairTensor.from_vector(self.source, self.target, [v * factor for v in self.vector()])

    def to_dict(self) -> dict[str, Any]:
        return {
            "terms": [
                {"source": [i, p], "target": [j, q], "coefficient": format_gaussian(value)}
                for (i, p, j, q), value in self.entries
            ]
        }


@dataclass(slots=True)
class PairRelationSpace:
    source: SplitBundle
    target: SplitBundle
    basis: list[PairTensor]
    rank: int
    provenance: dict[str, Any] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": list(self.source.degrees),
            "target": list(self.target.degrees),
            "dimension": self.dimension,
            "jet_rank": self.rank,
            "basis": [tensor.to_dict() for tensor in self.basis],
        }


def pair_relation_space(source: SplitBundle, target: SplitBundle) -> PairRelationSpace:
    """``R_2(E, F) = H^0(E ⊠ F ⊗ I_Δ^2)`` as the exact kernel of the 2-jet map."""

    matrix = jet_matrix(source, target)
    vectors = exact_kernel(matrix)
    rank = exact_rank(matrix)
    LOGGER.info(
        "R_2(%s, %s): %dx%d jet matrix, rank %d, dimension %d",
        source,
        target,
        matrix.rows,
        matrix.cols,
        rank,
        len(vectors),
    )
    return PairRelationSpace(
        source=source,
        target=target,
        basis=[PairTensor.from_vector(source, target, v) for v in vectors],
        rank=rank,
        provenance={"rows": matrix.rows, "cols": matrix.cols},
    )


def vanishes_to_order_two(tensor: PairTensor) -> bool:
    jets = jet_matrix(tensor.source, tensor.target).apply(tensor.vector())
    return not any(jets)


@dataclass(frozen=True, slots=True)
class PairImage:
    """Class in ``H^{1,0}(F) = ⊕_j H^0(O(b_j) ⊗ K)``, one image per summand."""

    components: tuple[GaussImage, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"components": [component.to_dict() for component in self.components]}


def schiffer_components(source: SplitBundle, points: Sequence[GaussianRational | None]) -> tuple[BumpForm, ...]:
    """Componentwise Schiffer class in ``H^1(E*)``; ``None`` leaves a summand at zero."""

    if len(points) != len(source.degrees):
        raise ValueError("one Schiffer point (or None) per summand of E is required")
    forms = []
    for degree, point in zip(source.degrees, points):
        backend = P1Backend(degree)
        forms.append(BumpForm((), twist=-1) if point is None else backend.schiffer(point))
    return tuple(forms)


def rho_pair(tensor: PairTensor, xi: Sequence[BumpForm]) -> PairImage:
    """``σ = Σ a_ij ∂h_i ⊗ μ_j`` with ``θ λ_i = ∂̄h_i``, extracted per summand of ``F``."""

    source, target = tensor.source, tensor.target
    if len(xi) != len(source.degrees):
        raise ValueError("ξ needs one component per summand of E")
    derivatives: dict[tuple[int, int], RationalFunction] = {}
    for i, p in source.sections():
        product = BumpForm.build(
            [(c, f * Polynomial.monomial(p)) for c, f in xi[i].terms], xi[i].twist + 1
        )
        derivatives[(i, p)] = harmonic_decompose_p1(product).potential.derivative()
    sigmas = [RationalFunction.zero() for _ in target.degrees]
    for (i, p, j, q), value in tensor.entries:
        sigmas[j] = sigmas[j] + derivatives[(i, p)] * Polynomial.monomial(q, value)
    components = tuple(
        P1Backend(degree).extract_class(sigma, 1) for degree, sigma in zip(target.degrees, sigmas)
    )
    return PairImage(components)


__all__ = [
    "PairImage",
    "PairRelationSpace",
    "PairTensor",
    "SplitBundle",
    "jet_matrix",
    "pair_relation_space",
    "rho_pair",
    "schiffer_components",
    "vanishes_to_order_two",
]
