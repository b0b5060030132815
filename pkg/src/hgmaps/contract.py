"""Backend capability contract shared by the projective-line and torus backends."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Mapping, Protocol, Sequence

from .exact.scalars import Scalar, format_scalar, to_complex

TRIVIAL_CHARACTER: tuple[float, float] = (0.0, 0.0)


class BackendError(RuntimeError):
    """Raised when a backend cannot complete a computation."""


class ResidualError(BackendError):
    """A measured residual exceeded its tolerance."""


class RankAmbiguityError(BackendError):
    """The singular-value gap across the rank threshold is too small to decide the rank."""


class ThetaBasisError(BackendError):
    """The sampled theta basis is singular or violates its automorphy law."""


class ChartError(BackendError):
    """A bump disc reaches the boundary of the fundamental-domain chart."""


@dataclass(slots=True)
class Tolerances:
    """Numerical thresholds; the exact backend ignores all of them."""

    decomposition: float = 1e-8
    closedness: float = 1e-6
    projection: float = 1e-6
    ratio_spread: float = 1e-5
    cross_path: float = 1e-6
    welldefined: float = 1e-6
    metric_scale: float = 1e-12
    symmetry: float = 1e-6
    singular_value: float = 1e-8
    rank_gap: float = 1e3
    quasi_periodicity: float = 1e-10
    theta_tail: float = 1e-12
    identity: float = 1e-8
    backend_agreement: float = 1e-4
    convergence_floor: float = 1e-11

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Tolerances":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown tolerance keys: {', '.join(unknown)}")
        return cls(**{key: float(value) for key, value in data.items()})


@dataclass(slots=True)
class HarmonicDecomposition:
    """``source = harmonic + dbar(potential)`` for a scalar (0,1)-form.

    ``residual`` is the relative defect of that identity; ``aliasing`` is the
    share of the source's spectral energy in the outer band (always 0 on the
    exact backend).
    """

    harmonic: Any
    potential: Any
    source: Any
    residual: float = 0.0
    aliasing: float = 0.0


@dataclass(frozen=True, slots=True)
class GaussImage:
    """Class in ``H^{1,0}(L^j)`` as coordinates in a holomorphic basis of ``H^0(L^j ⊗ K)``."""

    coordinates: tuple[Scalar, ...]
    power: int
    exact: bool
    character: tuple[float, float] = TRIVIAL_CHARACTER
    decomposition_residual: float = 0.0
    closedness_residual: float = 0.0
    projection_residual: float = 0.0
    aliasing: float = 0.0

    def is_zero(self) -> bool:
        return not any(self.coordinates) if self.exact else max(
            (abs(c) for c in self.coordinates), default=0.0
        ) == 0.0

    def as_complex(self) -> list[complex]:
        return [to_complex(c) for c in self.coordinates]

    def distance(self, other: "GaussImage") -> float:
        """Relative coordinate distance ``|a - b| / max(|a|, |b|)``."""

        if len(self.coordinates) != len(other.coordinates):
            raise ValueError("images live in spaces of different dimension")
        a, b = self.as_complex(), other.as_complex()
        norm = max(_norm(a), _norm(b))
        if norm == 0.0:
            return 0.0
        return _norm([x - y for x, y in zip(a, b)]) / norm

    def to_dict(self) -> dict[str, Any]:
        return {
            "power": self.power,
            "exact": self.exact,
            "character": list(self.character),
            "coordinates": [format_scalar(c) for c in self.coordinates],
            "residuals": {
                "decomposition": self.decomposition_residual,
                "closedness": self.closedness_residual,
                "projection": self.projection_residual,
                "aliasing": self.aliasing,
            },
        }


@dataclass(frozen=True, slots=True)
class WahlImage:
    """Section of ``L^2 ⊗ K^2`` in the backend's basis."""

    coordinates: tuple[Scalar, ...]
    exact: bool
    projection_residual: float = 0.0

    def as_complex(self) -> list[complex]:
        return [to_complex(c) for c in self.coordinates]

    def to_dict(self) -> dict[str, Any]:
        return {
            "exact": self.exact,
            "coordinates": [format_scalar(c) for c in self.coordinates],
            "projection_residual": self.projection_residual,
        }


@dataclass(slots=True)
class KernelResult:
    """Kernel vectors of a multiplication matrix with rank diagnostics."""

    vectors: list[tuple[Scalar, ...]]
    rank: int
    gap: float = math.inf
    singular_values: list[float] = field(default_factory=list)


def _norm(values: Sequence[complex]) -> float:
    return math.sqrt(sum(abs(v) ** 2 for v in values))


class Backend(Protocol):
    """Capabilities a curve backend offers to the generic construction."""

    name: str
    exact: bool
    degree: int
    tolerances: Tolerances

    @property
    def rank(self) -> int:
        """``h^0(L)``."""

    def target_dimension(self, power: int) -> int:
        """``h^0(L^power)``."""

    def scalar(self, numerator: int, denominator: int = 1) -> Scalar: ...

    def zero_scalar(self) -> Scalar: ...

    def section_values(self, index: int) -> Any: ...

    def section_second_derivative(self, index: int) -> Any: ...

    def section_product(self, multiset: Sequence[int]) -> Any: ...

    def multiplication_column(self, multiset: Sequence[int]) -> Sequence[Scalar]: ...

    def relation_kernel(self, columns: Sequence[Sequence[Scalar]], rows: int) -> KernelResult: ...

    def relation_residual(self, coefficients: Mapping[tuple[int, ...], Scalar]) -> float:
        """Relative size of ``Σ c_M λ^M``; zero for a true relation."""

    def schiffer(self, point: Any, twist: int = 1, *, dual: bool = False) -> Any: ...

    def form_character(self, form: Any) -> tuple[float, float]: ...

    def cup(self, form: Any, multiset: Sequence[int]) -> Any: ...

    def harmonic_decompose(self, form: Any) -> HarmonicDecomposition: ...

    def del_potential(self, decomposition: HarmonicDecomposition) -> Any: ...

    def del_source(self, decomposition: HarmonicDecomposition) -> Any: ...

    def zero_function(self) -> Any: ...

    def extract_class(
        self,
        sigma: Any,
        power: int,
        *,
        dbar_sigma: Any = None,
        decomposition_residual: float = 0.0,
        aliasing: float = 0.0,
        character: tuple[float, float] = TRIVIAL_CHARACTER,
        strict: bool = True,
    ) -> GaussImage: ...

    def pair(self, xi: Any, image: GaussImage) -> Scalar: ...

    def wahl_class(self, expression: Any, *, strict: bool = True) -> WahlImage: ...

    def evaluate_wahl(self, image: WahlImage, point: Any) -> Scalar: ...

    def closed_form_rho(self, relation: Any, point: Any, *, strict: bool = True) -> GaussImage: ...


__all__ = [
    "Backend",
    "BackendError",
    "ChartError",
    "GaussImage",
    "HarmonicDecomposition",
    "KernelResult",
    "RankAmbiguityError",
    "ResidualError",
    "TRIVIAL_CHARACTER",
    "ThetaBasisError",
    "Tolerances",
    "WahlImage",
]
