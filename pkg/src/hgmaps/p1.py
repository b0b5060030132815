"""Exact backend for ``L = O(d)`` on the projective line.

Everything is written in the affine chart ``z``. A Schiffer representative
``f ∂̄b ⊗ ℓ*`` is never sampled: outside the annulus where ``∂̄b`` lives all
objects are rational, so decompositions, classes and pairings reduce to
partial fractions and residues.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .contract import (
    TRIVIAL_CHARACTER,
    BackendError,
    GaussImage,
    HarmonicDecomposition,
    KernelResult,
    ResidualError,
    Tolerances,
    WahlImage,
)
from .exact.matrices import ExactMatrix, exact_kernel, exact_rank
from .exact.polynomials import Polynomial, RationalFunction, partial_fractions
from .exact.scalars import ONE, ZERO, GaussianRational, format_gaussian, ratio
from .relations import Multiset, SymmetricTensor

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class P1Bundle:
    degree: int

    def h0(self) -> int:
        return self.degree + 1 if self.degree >= 0 else 0

    @staticmethod
    def h1_dual(e: int) -> int:
        """``h^1(O(-e))``."""

        return e - 1 if e >= 2 else 0


@dataclass(frozen=True, slots=True)
class BumpForm:
    """The (0,1)-form ``Σ_c f_c ∂̄b_c`` valued in ``O(twist·d)``.

    Each bump ``b_c`` is 1 near its center ``c`` and its support avoids every
    other center and every pole of ``f_c`` except ``c`` itself.
    """

    terms: tuple[tuple[GaussianRational, RationalFunction], ...]
    twist: int

    @classmethod
    def build(
        cls, terms: Sequence[tuple[GaussianRational, RationalFunction]], twist: int
    ) -> "BumpForm":
        merged: dict[GaussianRational, RationalFunction] = {}
        order: list[GaussianRational] = []
        for center, coefficient in terms:
            if center in merged:
                merged[center] = merged[center] + coefficient
            else:
                merged[center] = coefficient
                order.append(center)
        return cls(
            terms=tuple((c, merged[c]) for c in order if not merged[c].is_zero()),
            twist=twist,
        )

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "BumpForm") -> "BumpForm":
        if self.twist != other.twist:
            raise ValueError("cannot add forms with different twists")
        return BumpForm.build(self.terms + other.terms, self.twist)

    def scale(self, factor: GaussianRational) -> "BumpForm":
        return BumpForm.build([(c, f * factor) for c, f in self.terms], self.twist)

    @property
    def character(self) -> tuple[float, float]:
        return TRIVIAL_CHARACTER


@dataclass(frozen=True, slots=True)
class BumpJet:
    """Per-center pair ``(F, ∂F)`` whose vanishing makes ``Σ ∂(F ∂̄b)`` vanish."""

    terms: tuple[tuple[GaussianRational, RationalFunction, RationalFunction], ...]

    def __add__(self, other: "BumpJet") -> "BumpJet":
        merged: dict[GaussianRational, tuple[RationalFunction, RationalFunction]] = {}
        order: list[GaussianRational] = []
        for center, value, slope in self.terms + other.terms:
            if center in merged:
                old_value, old_slope = merged[center]
                merged[center] = (old_value + value, old_slope + slope)
            else:
                merged[center] = (value, slope)
                order.append(center)
        return BumpJet(tuple((c, *merged[c]) for c in order))

    def __mul__(self, factor: object) -> "BumpJet":
        if not isinstance(factor, (Polynomial, RationalFunction, GaussianRational, int)):
            return NotImplemented
        return BumpJet(tuple((c, v * factor, s * factor) for c, v, s in self.terms))

    def is_zero(self) -> bool:
        return all(value.is_zero() and slope.is_zero() for _, value, slope in self.terms)


@dataclass(frozen=True, slots=True)
class SchifferVariationP1:
    """``ξ_P ∈ H^1(O(-md))`` represented by ``(1/(z-P)) ∂̄b ⊗ ℓ*``."""

    point: GaussianRational
    twist: int = 1

    def representative(self, degree: int) -> BumpForm:
        if self.twist < 1:
            raise ValueError("Schiffer twist must be positive")
        if self.twist * degree < 2:
            LOGGER.debug("H^1(O(-%d)) is zero; ξ_P represents the zero class", self.twist * degree)
        pole = RationalFunction(Polynomial.constant(1), Polynomial.linear(self.point))
        return BumpForm(((self.point, pole),), twist=-self.twist)


@dataclass(frozen=True, slots=True)
class EtaDifferential:
    """Differential of the second kind with one double pole."""

    pole: GaussianRational
    principal: GaussianRational
    regular: RationalFunction = field(default_factory=RationalFunction.zero)

    def as_rational(self) -> RationalFunction:
        double = Polynomial.linear(self.pole) ** 2
        return RationalFunction(Polynomial.constant(self.principal), double) + self.regular

    @property
    def residue(self) -> GaussianRational:
        return partial_fractions(self.as_rational(), self.pole).residue


def section_basis(d: int) -> tuple[Polynomial, ...]:
    """Monomial basis ``1, z, ..., z^d`` of ``H^0(O(d))``."""

    if d < 0:
        raise ValueError("section_basis needs a degree d >= 0")
    return tuple(Polynomial.monomial(i) for i in range(d + 1))


def eta_p1(point: GaussianRational) -> EtaDifferential:
    """``-dz/(z-P)^2``: principal coefficient -1, no regular part on the projective line."""

    return EtaDifferential(pole=point, principal=-ONE)


def harmonic_decompose_p1(form: BumpForm) -> HarmonicDecomposition:
    """Decompose a scalar ``Σ f_c ∂̄b_c`` as ``∂̄h`` (``H^{0,1}(P^1) = 0``).

    ``h = Σ_c (b_c f_c - p_c)`` where ``p_c`` is the principal part of ``f_c``
    at ``c``; outside the bumps ``h = -Σ p_c``, which is what the potential
    stores.
    """

    if form.twist != 0:
        raise ValueError(f"harmonic decomposition needs a scalar form, got twist {form.twist}")
    exterior = RationalFunction.zero()
    for center, coefficient in form.terms:
        if not _poles_only_at(coefficient, center):
            raise BackendError(
                f"coefficient {coefficient} has poles away from its bump center {format_gaussian(center)}"
            )
        exterior = exterior - partial_fractions(coefficient, center).as_rational()
    return HarmonicDecomposition(harmonic=ZERO, potential=exterior, source=form)


def _poles_only_at(f: RationalFunction, center: GaussianRational) -> bool:
    return f.denominator == Polynomial.linear(center) ** f.denominator.degree


def pair_schiffer(xi: BumpForm, omega: RationalFunction) -> GaussianRational:
    """``(1/2πi) ∫ ω ∧ ξ`` as the residue sum ``Σ_c Res_c(f_c Ψ)``.

    The factor ``2πi`` is carried symbolically: for ``ξ = ξ_P`` the value is
    ``Ψ(P)``.
    """

    total = ZERO
    for center, coefficient in xi.terms:
        if not omega.is_regular_at(center):
            raise BackendError(f"ω has a pole at the Schiffer point {format_gaussian(center)}")
        total += partial_fractions(coefficient * omega, center).residue
    return total


class P1Backend:
    """``O(d)`` on the projective line with an arbitrary exact section basis."""

    name = "p1"
    exact = True

    def __init__(
        self,
        degree: int,
        sections: Sequence[Polynomial] | None = None,
        *,
        tolerances: Tolerances | None = None,
    ) -> None:
        if degree < 0:
            raise ValueError("P^1 degree must be non-negative")
        self.degree = degree
        self.bundle = P1Bundle(degree)
        self.tolerances = tolerances or Tolerances()
        self._sections = tuple(sections) if sections is not None else section_basis(degree)
        self._check_basis(self._sections)

    def _check_basis(self, sections: Sequence[Polynomial]) -> None:
        if len(sections) != self.bundle.h0():
            raise ValueError(f"O({self.degree}) needs {self.bundle.h0()} sections, got {len(sections)}")
        for section in sections:
            if section.degree > self.degree:
                raise ValueError(f"section {section} has degree above {self.degree}")
        matrix = ExactMatrix.from_rows(
            [[s.coefficient(e) for e in range(self.degree + 1)] for s in sections],
            self.degree + 1,
        )
        if exact_rank(matrix) != len(sections):
            raise ValueError("sections are linearly dependent")

    def with_basis(self, sections: Sequence[Polynomial]) -> "P1Backend":
        return P1Backend(self.degree, sections, tolerances=self.tolerances)

    @property
    def rank(self) -> int:
        return len(self._sections)

    @property
    def sections(self) -> tuple[Polynomial, ...]:
        return self._sections

    def target_dimension(self, power: int) -> int:
        return P1Bundle(power * self.degree).h0()

    def differential_dimension(self, power: int) -> int:
        """``h^0(O(power·d) ⊗ K) = h^0(O(power·d - 2))``."""

        return P1Bundle(power * self.degree - 2).h0()

    # -- scalars and sections ----------------------------------------

    def scalar(self, numerator: int, denominator: int = 1) -> GaussianRational:
        return ratio(numerator, denominator)

    def zero_scalar(self) -> GaussianRational:
        return ZERO

    def section_values(self, index: int) -> Polynomial:
        return self._sections[index]

    def section_second_derivative(self, index: int) -> Polynomial:
        return self._sections[index].derivative(2)

    def section_product(self, multiset: Sequence[int]) -> Polynomial:
        result = Polynomial.constant(1)
        for index in multiset:
            result = result * self._sections[index]
        return result

    def multiplication_column(self, multiset: Sequence[int]) -> list[GaussianRational]:
        product = self.section_product(multiset)
        return [product.coefficient(e) for e in range(self.target_dimension(len(multiset)))]

    def relation_kernel(self, columns: Sequence[Sequence[GaussianRational]], rows: int) -> KernelResult:
        matrix = ExactMatrix.from_columns(columns, rows)
        vectors = exact_kernel(matrix)
        return KernelResult(vectors=vectors, rank=matrix.cols - len(vectors))

    def relation_residual(self, coefficients: Mapping[Multiset, GaussianRational]) -> float:
        combination = Polynomial()
        for multiset, value in coefficients.items():
            combination = combination + self.section_product(multiset) * value
        return 0.0 if combination.is_zero() else float("inf")

    # -- forms --------------------------------------------------------

    def schiffer(self, point: GaussianRational, twist: int = 1, *, dual: bool = False) -> BumpForm:
        return SchifferVariationP1(point, twist).representative(self.degree)

    def perturbation(self, point: GaussianRational, polynomial: Polynomial, twist: int = 1) -> BumpForm:
        """``∂̄(b u ⊗ ℓ*)`` for a polynomial ``u``: an exact form, zero in cohomology."""

        return BumpForm(((point, RationalFunction.from_polynomial(polynomial)),), twist=-twist)

    def form_character(self, form: BumpForm) -> tuple[float, float]:
        return TRIVIAL_CHARACTER

    def cup(self, form: BumpForm, multiset: Sequence[int]) -> BumpForm:
        section = self.section_product(multiset)
        return BumpForm.build([(c, f * section) for c, f in form.terms], form.twist + len(multiset))

    def harmonic_decompose(self, form: BumpForm) -> HarmonicDecomposition:
        return harmonic_decompose_p1(form)

    def del_potential(self, decomposition: HarmonicDecomposition) -> RationalFunction:
        return decomposition.potential.derivative()

    def del_source(self, decomposition: HarmonicDecomposition) -> BumpJet:
        form: BumpForm = decomposition.source
        return BumpJet(tuple((c, f, f.derivative()) for c, f in form.terms))

    def zero_function(self) -> RationalFunction:
        return RationalFunction.zero()

    def extract_class(
        self,
        sigma: RationalFunction | Polynomial,
        power: int,
        *,
        dbar_sigma: BumpJet | None = None,
        decomposition_residual: float = 0.0,
        aliasing: float = 0.0,
        character: tuple[float, float] = TRIVIAL_CHARACTER,
        strict: bool = True,
    ) -> GaussImage:
        closedness = 0.0
        if dbar_sigma is not None and not dbar_sigma.is_zero():
            closedness = float("inf")
            if strict:
                raise ResidualError("σ is not ∂̄-closed: Σ a_ST φ_S ∂φ_T does not vanish")
        if isinstance(sigma, Polynomial):
            sigma = RationalFunction.from_polynomial(sigma)
        if not sigma.is_polynomial():
            raise ResidualError(f"σ = {sigma} is not holomorphic on the chart")
        dimension = self.differential_dimension(power)
        psi = sigma.as_polynomial()
        if psi.degree >= dimension:
            raise ResidualError(
                f"σ = {psi} does not extend over infinity as a section of O({power * self.degree - 2})"
            )
        coordinates = tuple(psi.coefficient(e) for e in range(dimension))
        return GaussImage(
            coordinates=coordinates,
            power=power,
            exact=True,
            closedness_residual=closedness,
        )

    def differential(self, image: GaussImage) -> Polynomial:
        return Polynomial(image.coordinates)

    def pair(self, xi: BumpForm, image: GaussImage) -> GaussianRational:
        if image.power != -xi.twist:
            raise ValueError(f"cannot pair H^1(L^{xi.twist}) with H^0(L^{image.power} ⊗ K)")
        return pair_schiffer(xi, RationalFunction.from_polynomial(self.differential(image)))

    # -- second Gaussian map ------------------------------------------

    def wahl_class(self, expression: Polynomial, *, strict: bool = True) -> WahlImage:
        dimension = P1Bundle(2 * self.degree - 4).h0()
        if expression.degree >= dimension:
            raise BackendError(f"μ2 expression {expression} is not a section of O({2 * self.degree - 4})")
        return WahlImage(coordinates=tuple(expression.coefficient(e) for e in range(dimension)), exact=True)

    def evaluate_wahl(self, image: WahlImage, point: GaussianRational) -> GaussianRational:
        return Polynomial(image.coordinates)(point)

    # -- closed forms ---------------------------------------------------

    def closed_form_rho(
        self, relation: SymmetricTensor, point: GaussianRational, *, strict: bool = True
    ) -> GaussImage:
        return rho_schiffer_exact(relation, point, backend=self)


def rho_schiffer_exact(
    relation: SymmetricTensor,
    point: GaussianRational,
    *,
    backend: P1Backend | None = None,
) -> GaussImage:
    """``ρ_Q(ξ_P) = Σ a_ij φ_i(P) φ_j(z) / (z-P)^2 dz`` for ``Q ∈ I_2(O(d))``."""

    if relation.degree != 2:
        raise ValueError("the closed form covers quadrics (k = 2) only")
    if backend is None:
        backend = P1Backend(relation.size - 1)
    sections = backend.sections
    values = [section(point) for section in sections]
    numerator = Polynomial()
    for i, value in enumerate(values):
        if not value:
            continue
        for j, section in enumerate(sections):
            entry = relation.entry((i, j))
            if entry:
                numerator = numerator + section * (entry * value)
    try:
        psi = numerator.exact_quotient(Polynomial.linear(point) ** 2)
    except ValueError as exc:
        raise BackendError(
            f"relation does not vanish to order 2 at {format_gaussian(point)}; it is not in I_2"
        ) from exc
    return backend.extract_class(psi, 1)


def schiffer_span(
    backend: P1Backend,
    points: Sequence[GaussianRational],
    coefficients: Sequence[GaussianRational],
    twist: int = 1,
) -> BumpForm:
    """General class of ``H^1(O(-md))`` as ``Σ c_p ξ_{P_p}`` over ``md - 1`` points."""

    size = twist * backend.degree - 1
    if size < 1:
        raise ValueError(f"H^1(O(-{twist * backend.degree})) is zero")
    if len(points) != size or len(coefficients) != size:
        raise ValueError(f"a spanning set for H^1(O(-{twist * backend.degree})) needs {size} points")
    evaluation = ExactMatrix.from_rows([[Polynomial.monomial(e)(p) for e in range(size)] for p in points], size)
    if exact_rank(evaluation) != size:
        raise ValueError("Schiffer points do not span: evaluation matrix is singular")
    total = BumpForm((), twist=-twist)
    for p, c in zip(points, coefficients):
        total = total + backend.schiffer(p, twist).scale(c)
    return total


__all__ = [
    "BumpForm",
    "BumpJet",
    "EtaDifferential",
    "P1Backend",
    "P1Bundle",
    "SchifferVariationP1",
    "eta_p1",
    "harmonic_decompose_p1",
    "pair_schiffer",
    "rho_schiffer_exact",
    "schiffer_span",
    "section_basis",
]
