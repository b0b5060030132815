"""Flat torus ``C/(Z + τZ)``, its sampling grid and the Schiffer bump profile."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


@dataclass(frozen=True, slots=True)
class TorusGeometry:
    """Lattice ``Z + τZ`` sampled on an ``N x N`` grid of lattice coordinates.

    ``z = x + τy`` with ``(x, y) ∈ [0, 1)^2``; arrays are indexed ``[ix, iy]``.
    The Kähler form is ``c·(i/2) dz∧dz̄`` with ``c = metric_scale``.
    """

    tau: complex
    grid: int
    metric_scale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", complex(self.tau))
        if self.tau.imag <= 0:
            raise ValueError(f"Im τ must be positive, got τ = {self.tau}")
        if not is_power_of_two(self.grid):
            raise ValueError(f"grid N must be a power of two, got {self.grid}")
        if self.metric_scale <= 0:
            raise ValueError(f"metric scale must be positive, got {self.metric_scale}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.grid

    @property
    def area(self) -> float:
        """Total area ``c·Im τ``."""

        return self.metric_scale * self.tau.imag

    @property
    def cell_weight(self) -> float:
        """Quadrature weight of one grid cell."""

        return self.area / (self.grid * self.grid)

    def axes(self) -> np.ndarray:
        return np.arange(self.grid) / self.grid

    def lattice_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        axis = self.axes()
        return np.meshgrid(axis, axis, indexing="ij")

    def mesh(self) -> np.ndarray:
        x, y = self.lattice_mesh()
        return x + self.tau * y

    def frequencies(self, character: tuple[float, float] = (0.0, 0.0)) -> tuple[np.ndarray, np.ndarray]:
        """Mode numbers ``(m, n)`` of ``e^{2πi(mx + ny)}`` shifted by the flat character."""

        modes = np.fft.fftfreq(self.grid, d=1.0 / self.grid)
        m, n = np.meshgrid(modes + character[0], modes + character[1], indexing="ij")
        return m, n

    def to_lattice(self, point: complex) -> tuple[float, float]:
        point = complex(point)
        y = point.imag / self.tau.imag
        x = point.real - self.tau.real * y
        return x, y

    def from_lattice(self, x: float, y: float) -> complex:
        return x + self.tau * y

    def reduce(self, points: np.ndarray) -> np.ndarray:
        """Translate points into the fundamental cell."""

        y = points.imag / self.tau.imag
        x = points.real - self.tau.real * y
        return points - np.floor(x) - np.floor(y) * self.tau

    def chart_margin(self, point: complex) -> float:
        """Euclidean distance from ``point`` to the boundary of the open unit cell."""

        x, y = self.to_lattice(point)
        if not (0.0 < x < 1.0 and 0.0 < y < 1.0):
            return 0.0
        z = complex(point)
        direction = self.tau / abs(self.tau)
        distances = (
            z.imag,
            self.tau.imag - z.imag,
            abs((z * direction.conjugate()).imag),
            abs(((z - 1.0) * direction.conjugate()).imag),
        )
        return min(distances)


BUMP_STIFFNESS = 2.0


def bump_jet(rho: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Radial profile ``b`` equal to 1 on ``ρ <= r`` and 0 on ``ρ >= 2r``, with ``db/dρ`` and ``d²b/dρ²``.

    ``b = s(1-t) / (s(1-t) + s(t))`` with ``t = (ρ - r)/r`` and ``s(t) = e^{-c/t}``,
    ``c = BUMP_STIFFNESS``. Writing ``b = 1/(1 + e^{-L})`` with ``L = c(1/t - 1/(1-t))``
    gives ``b' = b(1-b) L'`` and ``b'' = b(1-b)((1-2b) L'^2 + L'')``.
    """

    t = (np.asarray(rho, dtype=float) - radius) / radius
    inside = (t > 0.0) & (t < 1.0)
    safe = np.where(inside, t, 0.5)
    rest = 1.0 - safe
    s_t = np.exp(-BUMP_STIFFNESS / safe)
    s_u = np.exp(-BUMP_STIFFNESS / rest)
    denominator = s_t + s_u
    logistic = s_u / denominator
    spread = s_t * s_u / denominator**2
    first = -BUMP_STIFFNESS * (1.0 / safe**2 + 1.0 / rest**2)
    second = 2.0 * BUMP_STIFFNESS * (1.0 / safe**3 - 1.0 / rest**3)
    slope = spread * first / radius
    curvature = spread * ((1.0 - 2.0 * logistic) * first**2 + second) / radius**2
    value = np.where(t <= 0.0, 1.0, np.where(t >= 1.0, 0.0, logistic))
    return value, np.where(inside, slope, 0.0), np.where(inside, curvature, 0.0)


def bump_profile(rho: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """``b`` and ``db/dρ``; see :func:`bump_jet`."""

    value, slope, _ = bump_jet(rho, radius)
    return value, slope


def chart_distance(geometry: TorusGeometry, point: complex) -> np.ndarray:
    """``z - P`` on the grid, taken inside the cut chart."""

    return geometry.mesh() - complex(point)


def required_margin(radius: float) -> float:
    return 2.0 * radius


def default_points(count: int) -> list[complex]:
    """Off-grid sample points in lattice coordinates, well inside the chart."""

    lattice = [(0.45, 0.48), (0.52, 0.43), (0.56, 0.55), (0.42, 0.58), (0.49, 0.51), (0.47, 0.53)]
    if count > len(lattice):
        raise ValueError(f"at most {len(lattice)} default torus points are available")
    return [complex(x, y) for x, y in lattice[:count]]


def lattice_point(geometry: TorusGeometry, coordinates: complex) -> complex:
    """Map a point given as ``x + iy`` in lattice coordinates to ``z = x + τy``."""

    return geometry.from_lattice(coordinates.real, coordinates.imag)


__all__ = [
    "BUMP_STIFFNESS",
    "TorusGeometry",
    "bump_jet",
    "bump_profile",
    "chart_distance",
    "default_points",
    "is_power_of_two",
    "lattice_point",
    "required_margin",
]

