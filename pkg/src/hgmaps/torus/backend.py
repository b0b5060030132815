"""Numerical-spectral backend on ``C/(Z + τZ)`` with the flat metric."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from threading import Lock
from typing import Mapping, Sequence

import numpy as np

from ..contract import (
    TRIVIAL_CHARACTER,
    ChartError,
    GaussImage,
    HarmonicDecomposition,
    KernelResult,
    RankAmbiguityError,
    ResidualError,
    Tolerances,
    WahlImage,
)
from ..relations import Multiset, SymmetricTensor
from .geometry import TorusGeometry, bump_jet, required_margin
from .spectral import dbar_solve, del_grid, is_trivial, weighted_norm, x_derivative
from .theta import ThetaBasis, theta_basis
from .weierstrass import eta_weierstrass

LOGGER = logging.getLogger(__name__)

Character = tuple[float, float]
DEFAULT_BUMP_RADIUS = 0.15


@dataclass(frozen=True, slots=True)
class GridForm:
    """Samples of a form valued in ``M_χ ⊗ L^power``.

    ``bidegree`` is ``(p, q)``; for ``(0, 1)`` and ``(1, 0)`` the samples are
    the ``dz̄`` and ``dz`` coefficients. ``del_samples`` holds ``∂`` of the
    coefficient when it is known in closed form.
    """

    bidegree: tuple[int, int]
    power: int
    character: Character
    samples: np.ndarray
    del_samples: np.ndarray | None = None

    def is_scalar(self) -> bool:
        return self.power == 0

    def __add__(self, other: "GridForm") -> "GridForm":
        if (self.bidegree, self.power, self.character) != (other.bidegree, other.power, other.character):
            raise ValueError("cannot add grid forms with different descriptors")
        derivative = None
        if self.del_samples is not None and other.del_samples is not None:
            derivative = self.del_samples + other.del_samples
        return replace(self, samples=self.samples + other.samples, del_samples=derivative)

    def scale(self, factor: complex) -> "GridForm":
        derivative = None if self.del_samples is None else self.del_samples * factor
        return replace(self, samples=self.samples * factor, del_samples=derivative)


def _negate(character: Character) -> Character:
    return ((-character[0]) % 1.0, (-character[1]) % 1.0)


class TorusBackend:
    """Degree-``d`` line bundle on the torus, optionally twisted by a flat character.

    Theta bases are built lazily per ``(power, character)`` and cached; the
    cache is guarded by a lock so a backend can be shared by worker threads.
    """

    name = "torus"
    exact = False

    def __init__(
        self,
        geometry: TorusGeometry,
        degree: int,
        *,
        bump_radius: float = DEFAULT_BUMP_RADIUS,
        character: Character = TRIVIAL_CHARACTER,
        tolerances: Tolerances | None = None,
    ) -> None:
        if degree < 1:
            raise ValueError("torus line bundles need degree d >= 1")
        if bump_radius <= 0:
            raise ValueError("bump radius must be positive")
        _check_character(character)
        self.geometry = geometry
        self.degree = degree
        self.bump_radius = bump_radius
        self.character = (float(character[0]), float(character[1]))
        self.tolerances = tolerances or Tolerances()
        self._mesh = geometry.mesh()
        self._bases: dict[tuple[int, Character], ThetaBasis] = {}
        self._lock = Lock()

    # -- variants -------------------------------------------------------

    def apply_flat_twist(self, character: Character) -> "TorusBackend":
        """Backend whose classes live in ``M_χ``-twisted bundles."""

        return TorusBackend(
            self.geometry,
            self.degree,
            bump_radius=self.bump_radius,
            character=character,
            tolerances=self.tolerances,
        )

    def with_geometry(self, geometry: TorusGeometry) -> "TorusBackend":
        return TorusBackend(
            geometry,
            self.degree,
            bump_radius=self.bump_radius,
            character=self.character,
            tolerances=self.tolerances,
        )

    def with_bump_radius(self, radius: float) -> "TorusBackend":
        return TorusBackend(
            self.geometry,
            self.degree,
            bump_radius=radius,
            character=self.character,
            tolerances=self.tolerances,
        )

    # -- bases ------------------------------------------------------------

    def basis(self, power: int, character: Character = TRIVIAL_CHARACTER) -> ThetaBasis:
        key = (power, character)
        with self._lock:
            cached = self._bases.get(key)
        if cached is not None:
            return cached
        built = theta_basis(self.geometry, power * self.degree, character, tolerances=self.tolerances)
        with self._lock:
            return self._bases.setdefault(key, built)

    @property
    def rank(self) -> int:
        return self.degree

    def target_dimension(self, power: int) -> int:
        return power * self.degree

    def differential_dimension(self, power: int) -> int:
        return power * self.degree

    def scalar(self, numerator: int, denominator: int = 1) -> complex:
        return complex(numerator / denominator)

    def zero_scalar(self) -> complex:
        return 0j

    def section_values(self, index: int) -> np.ndarray:
        return self.basis(1).samples[index]

    def section_second_derivative(self, index: int) -> np.ndarray:
        return x_derivative(self.geometry, self.section_values(index), order=2)

    def section_product(self, multiset: Sequence[int]) -> np.ndarray:
        result = np.ones((self.geometry.grid, self.geometry.grid), dtype=complex)
        samples = self.basis(1).samples
        for index in multiset:
            result = result * samples[index]
        return result

    # -- relations ------------------------------------------------------

    def multiplication_column(self, multiset: Sequence[int]) -> np.ndarray:
        target = self.basis(len(multiset))
        coordinates, residual = target.project(self.section_product(multiset))
        if residual > self.tolerances.projection:
            raise ResidualError(
                f"product of sections {tuple(multiset)} leaves H^0(L^{len(multiset)}) (residual {residual:.3e})"
            )
        return coordinates

    def relation_kernel(self, columns: Sequence[np.ndarray], rows: int) -> KernelResult:
        matrix = np.array(columns, dtype=complex).T.reshape(rows, len(columns))
        _, singular, vh = np.linalg.svd(matrix)
        largest = float(singular[0]) if singular.size else 0.0
        threshold = self.tolerances.singular_value * largest
        rank = int(np.count_nonzero(singular > threshold))
        gap = float("inf")
        if 0 < rank < singular.size:
            below = float(singular[rank])
            gap = float(singular[rank - 1]) / below if below > 0 else float("inf")
            if gap < self.tolerances.rank_gap:
                raise RankAmbiguityError(
                    f"numerical rank ambiguous: singular-value gap {gap:.3e} across the "
                    f"threshold {threshold:.3e} is below {self.tolerances.rank_gap:.1e}"
                )
        vectors = []
        for row in vh[rank:]:
            vector = row.conj()
            pivot = vector[int(np.argmax(np.abs(vector)))]
            vector = vector * (abs(pivot) / pivot) / np.linalg.norm(vector)
            vectors.append(tuple(complex(v) for v in vector))
        LOGGER.debug("Multiplication matrix %dx%d rank %d gap %.3e", rows, len(columns), rank, gap)
        return KernelResult(vectors=vectors, rank=rank, gap=gap, singular_values=[float(s) for s in singular])

    def relation_residual(self, coefficients: Mapping[Multiset, complex]) -> float:
        if not coefficients:
            return 0.0
        k = len(next(iter(coefficients)))
        root = np.sqrt(self.basis(k).factor.metric(self._mesh))
        total = np.zeros_like(self._mesh)
        scale = 0.0
        for multiset, value in coefficients.items():
            product = self.section_product(multiset)
            scale = max(scale, float(np.max(np.abs(product) * root)))
            total = total + product * value
        return float(np.max(np.abs(total) * root)) / scale if scale > 0 else 0.0

    # -- Schiffer forms ---------------------------------------------------

    def _check_chart(self, point: complex, radius: float) -> None:
        margin = self.geometry.chart_margin(point)
        if margin <= required_margin(radius):
            raise ChartError(
                f"bump disc of radius {required_margin(radius):.3f} about {point} meets the chart "
                f"boundary (margin {margin:.3f})"
            )

    def _bump_slope(self, point: complex, radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``z - P``, the ``dz̄`` coefficient ``g = b'(ρ)/(2ρ)`` of ``∂̄b/(z-P)`` and its ``∂g``.

        ``∂ρ = conj(z - P)/(2ρ)``, so ``∂g = (ρ b'' - b') conj(z - P) / (4ρ^3)``.
        """

        offset = self._mesh - complex(point)
        rho = np.abs(offset)
        _, slope, curvature = bump_jet(rho, radius)
        safe = np.where(rho > 0, rho, 1.0)
        coefficient = np.where(rho > 0, slope / (2.0 * safe), 0.0)
        derivative = np.where(rho > 0, (safe * curvature - slope) * offset.conj() / (4.0 * safe**3), 0.0)
        return offset, coefficient, derivative

    def schiffer(
        self,
        point: complex,
        twist: int = 1,
        *,
        dual: bool = False,
        radius: float | None = None,
    ) -> GridForm:
        """``(1/(z-P)) ∂̄b ⊗ ν ⊗ ℓ*``: ``dz̄`` coefficient ``b'(ρ)/(2ρ)``."""

        radius = radius or self.bump_radius
        self._check_chart(point, radius)
        _, coefficient, derivative = self._bump_slope(point, radius)
        character = _negate(self.character) if dual else self.character
        return GridForm(
            bidegree=(0, 1),
            power=-twist,
            character=character,
            samples=coefficient.astype(complex),
            del_samples=derivative.astype(complex),
        )

    def perturbation(
        self,
        point: complex,
        coefficients: Sequence[complex],
        *,
        radius: float | None = None,
        twist: int = 1,
    ) -> GridForm:
        """``∂̄(b u)`` with ``u = Σ c_j (z-P)^j``: exact, so zero in cohomology."""

        radius = radius or self.bump_radius
        self._check_chart(point, radius)
        offset, coefficient, derivative = self._bump_slope(point, radius)
        polynomial = np.zeros_like(offset)
        slope = np.zeros_like(offset)
        for power, value in enumerate(coefficients):
            polynomial = polynomial + complex(value) * offset ** (power + 1)
            slope = slope + complex(value) * (power + 1) * offset**power
        return GridForm(
            bidegree=(0, 1),
            power=-twist,
            character=self.character,
            samples=coefficient * polynomial,
            del_samples=derivative * polynomial + coefficient * slope,
        )

    def form_character(self, form: GridForm) -> Character:
        return form.character

    def cup(self, form: GridForm, multiset: Sequence[int]) -> GridForm:
        product = self.section_product(multiset)
        derivative = None
        if form.del_samples is not None:
            # products of untwisted sections are holomorphic and periodic in x
            derivative = form.del_samples * product + form.samples * x_derivative(self.geometry, product)
        return GridForm(
            bidegree=form.bidegree,
            power=form.power + len(multiset),
            character=form.character,
            samples=form.samples * product,
            del_samples=derivative,
        )

    # -- harmonic theory ----------------------------------------------------

    def harmonic_decompose(self, form: GridForm) -> HarmonicDecomposition:
        if not form.is_scalar():
            raise ValueError(f"harmonic decomposition needs a scalar form, got power {form.power}")
        decomposition = dbar_solve(
            self.geometry,
            form.samples,
            form.character,
            tolerance=self.tolerances.decomposition,
        )
        decomposition.source = form
        return decomposition

    def del_potential(self, decomposition: HarmonicDecomposition) -> np.ndarray:
        return del_grid(self.geometry, decomposition.potential, decomposition.source.character)

    def del_source(self, decomposition: HarmonicDecomposition) -> np.ndarray:
        """``∂(ψ - γ)``, the coefficient of ``∂∂̄h``.

        ``γ`` is constant, so this is ``∂ψ``: taken from the closed-form jet of
        the Schiffer representative when the form carries one, else spectrally.
        """

        form: GridForm = decomposition.source
        if form.del_samples is not None:
            return form.del_samples
        return del_grid(self.geometry, form.samples - decomposition.harmonic, form.character)

    def zero_function(self) -> np.ndarray:
        return np.zeros_like(self._mesh)

    def extract_class(
        self,
        sigma: np.ndarray,
        power: int,
        *,
        dbar_sigma: np.ndarray | None = None,
        decomposition_residual: float = 0.0,
        aliasing: float = 0.0,
        character: Character = TRIVIAL_CHARACTER,
        strict: bool = True,
    ) -> GaussImage:
        """Project ``σ`` onto the theta basis of ``M_χ ⊗ L^power`` (``K`` is trivial)."""

        if power < 1:
            raise ValueError("class extraction on the torus needs a positive power")
        target = self.basis(power, character)
        weight = target.weight / self.geometry.cell_weight
        norm = weighted_norm(self.geometry, sigma, weight)
        closedness = 0.0
        if dbar_sigma is not None and norm > 0.0:
            closedness = weighted_norm(self.geometry, dbar_sigma, weight) / norm
        coordinates, projection = target.project(sigma)
        if strict:
            if closedness > self.tolerances.closedness:
                raise ResidualError(f"σ closedness residual {closedness:.3e} exceeds {self.tolerances.closedness:.1e}")
            if projection > self.tolerances.projection:
                raise ResidualError(f"σ projection residual {projection:.3e} exceeds {self.tolerances.projection:.1e}")
        return GaussImage(
            coordinates=tuple(complex(c) for c in coordinates),
            power=power,
            exact=False,
            character=character,
            decomposition_residual=decomposition_residual,
            closedness_residual=closedness,
            projection_residual=projection,
            aliasing=aliasing,
        )

    def differential(self, image: GaussImage) -> np.ndarray:
        return self.basis(image.power, image.character).combine(np.array(image.coordinates))

    def pair(self, xi: GridForm, image: GaussImage) -> complex:
        """``(1/2πi) ∫ ω ∧ ξ`` with ``dz ∧ dz̄ = (τ̄ - τ) dx ∧ dy`` in lattice coordinates."""

        if image.power != -xi.power:
            raise ValueError(f"cannot pair H^1(L^{xi.power}) with H^0(L^{image.power} ⊗ K)")
        if not is_trivial(_sum(xi.character, image.character)):
            raise ValueError("pairing needs dual flat characters")
        psi = self.differential(image)
        tau = self.geometry.tau
        integral = (tau.conjugate() - tau) * (psi * xi.samples).sum() / self.geometry.grid**2
        return complex(integral / (2j * np.pi))

    # -- second Gaussian map ------------------------------------------------

    def wahl_class(self, expression: np.ndarray, *, strict: bool = True) -> WahlImage:
        coordinates, residual = self.basis(2).project(expression)
        if strict and residual > self.tolerances.projection:
            raise ResidualError(f"μ2 expression leaves H^0(L^2 ⊗ K^2) (residual {residual:.3e})")
        return WahlImage(coordinates=tuple(complex(c) for c in coordinates), exact=False, projection_residual=residual)

    def evaluate_wahl(self, image: WahlImage, point: complex) -> complex:
        values = self.basis(2).evaluate(np.array([complex(point)]))[:, 0]
        return complex(np.dot(np.array(image.coordinates), values))

    # -- closed form through η --------------------------------------------

    def closed_form_rho(self, relation: SymmetricTensor, point: complex, *, strict: bool = True) -> GaussImage:
        """``ρ_Q(ξ_P) = -η Σ a_ij φ_i(P) λ_j`` projected away from the pole at ``P``."""

        if relation.degree != 2:
            raise ValueError("the η path covers quadrics (k = 2) only")
        if not is_trivial(self.character):
            raise ValueError("the η path is available for the untwisted bundle only")
        base = self.basis(1)
        values = base.evaluate(np.array([complex(point)]))[:, 0]
        numerator = np.zeros_like(self._mesh)
        for i in range(self.rank):
            for j in range(self.rank):
                entry = relation.entry((i, j))
                if entry:
                    numerator = numerator + entry * values[i] * base.samples[j]
        eta = eta_weierstrass(self.geometry, point)
        psi = -eta.samples * numerator
        exclude = np.abs(self._mesh - complex(point)) < self.bump_radius
        target = self.basis(1)
        coordinates, residual = target.project(np.nan_to_num(psi), exclude=exclude)
        if strict and residual > self.tolerances.projection:
            raise ResidualError(f"η-path projection residual {residual:.3e} exceeds {self.tolerances.projection:.1e}")
        return GaussImage(
            coordinates=tuple(complex(c) for c in coordinates),
            power=1,
            exact=False,
            character=self.character,
            projection_residual=residual,
        )


def _sum(first: Character, second: Character) -> Character:
    total = ((first[0] + second[0]) % 1.0, (first[1] + second[1]) % 1.0)
    return tuple(0.0 if min(v, 1.0 - v) < 1e-12 else v for v in total)  # type: ignore[return-value]


def _check_character(character: Character) -> None:
    if len(character) != 2 or not all(0.0 <= float(c) < 1.0 for c in character):
        raise ValueError(f"flat character must lie in [0,1)^2, got {character}")


__all__ = ["DEFAULT_BUMP_RADIUS", "GridForm", "TorusBackend"]
