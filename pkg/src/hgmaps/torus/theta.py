"""Theta-function bases of ``H^0(M ⊗ L_d)`` on the torus and holomorphic projection."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..contract import TRIVIAL_CHARACTER, ResidualError, ThetaBasisError, Tolerances
from .geometry import TorusGeometry

LOGGER = logging.getLogger(__name__)

Character = tuple[float, float]


@dataclass(frozen=True, slots=True)
class AutomorphyFactor:
    """``f(z+1) = e^{2πiχ1} f(z)`` and ``f(z+τ) = e^{2πiχ2} e^{-πidτ - 2πidz} f(z)``."""

    degree: int
    tau: complex
    character: Character = TRIVIAL_CHARACTER

    def along_one(self) -> complex:
        return complex(np.exp(2j * np.pi * self.character[0]))

    def along_tau(self, z: np.ndarray) -> np.ndarray:
        d, tau = self.degree, self.tau
        return np.exp(2j * np.pi * self.character[1] - 1j * np.pi * d * tau - 2j * np.pi * d * z)

    def metric(self, z: np.ndarray) -> np.ndarray:
        """Hermitian metric ``e^{-2πd (Im z)^2 / Im τ}``."""

        return np.exp(-2.0 * np.pi * self.degree * np.imag(z) ** 2 / self.tau.imag)

    def to_dict(self) -> dict[str, object]:
        return {
            "degree": self.degree,
            "tau": [self.tau.real, self.tau.imag],
            "character": list(self.character),
        }


def truncation_modes(tau: complex, degree: int, tail: float) -> np.ndarray:
    """Indices ``n`` of the series terms kept for every basis element.

    Terms satisfy ``|e^{πiτ m'^2/d + 2πi m' z}| = e^{-π Im τ (m'^2/d + 2 m' y)}``
    for ``y ∈ [0, 1]``; the kept range makes the dropped tail smaller than ``tail``.
    """

    decay = math.pi * tau.imag / degree
    radius = math.sqrt(max(-math.log(tail), 1.0) / decay) + degree + 2.0
    low = math.floor((-radius - degree) / degree) - 1
    high = math.ceil(radius / degree) + 1
    return np.arange(low, high + 1)


def evaluate_sections(
    factor: AutomorphyFactor,
    z: np.ndarray,
    *,
    derivative: int = 0,
    tail: float = 1e-12,
) -> np.ndarray:
    """Values (or ``z``-derivatives) of the basis ``g_0..g_{d-1}`` at ``z``.

    ``g_a(z) = Σ_n exp(πiτ m'^2/d + 2πi m' c + 2πi(m' + χ1) z)`` with ``m' = dn + a``
    and ``c = (χ1 τ - χ2)/d``; the trivial character gives the classical
    ``f_a``.
    """

    z = np.asarray(z, dtype=complex)
    d, tau = factor.degree, factor.tau
    chi1, chi2 = factor.character
    shift = (chi1 * tau - chi2) / d
    result = np.zeros((d,) + z.shape, dtype=complex)
    for a in range(d):
        for n in truncation_modes(tau, d, tail):
            mode = d * int(n) + a
            exponent = 1j * np.pi * tau * mode * mode / d + 2j * np.pi * mode * shift
            frequency = 2j * np.pi * (mode + chi1)
            term = np.exp(exponent + frequency * z)
            if derivative:
                term = term * frequency**derivative
            result[a] += term
    return result


@dataclass(frozen=True, slots=True)
class ThetaBasis:
    """Grid-sampled basis of ``H^0(M ⊗ L_d)`` with an orthonormalisation for projection."""

    factor: AutomorphyFactor
    geometry: TorusGeometry
    samples: np.ndarray
    weight: np.ndarray
    orthonormal: np.ndarray
    triangular: np.ndarray
    singular_values: np.ndarray
    tail: float

    @property
    def degree(self) -> int:
        return self.factor.degree

    @property
    def character(self) -> Character:
        return self.factor.character

    def gram(self) -> np.ndarray:
        """``L^2`` Gram matrix ``<g_a, g_b>`` by grid quadrature."""

        flat = self.samples.reshape(self.degree, -1)
        weight = self.weight.reshape(-1)
        return (flat.conj() * weight) @ flat.T

    def evaluate(self, points: np.ndarray, derivative: int = 0) -> np.ndarray:
        return evaluate_sections(self.factor, points, derivative=derivative, tail=self.tail)

    def combine(self, coordinates: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(coordinates, dtype=complex), self.samples, axes=1)

    def project(
        self, samples: np.ndarray, *, exclude: np.ndarray | None = None
    ) -> tuple[np.ndarray, float]:
        """Least-squares coordinates of ``samples`` and the relative projection residual.

        ``exclude`` masks grid points (for example a disc around a pole) out of
        the fit.
        """

        root = np.sqrt(self.weight).reshape(-1)
        rhs = root * np.asarray(samples, dtype=complex).reshape(-1)
        if exclude is None:
            orthogonal = self.orthonormal.conj().T @ rhs
            coordinates = np.linalg.solve(self.triangular, orthogonal)
            fitted = self.orthonormal @ orthogonal
            remainder, scale = rhs - fitted, rhs
        else:
            keep = ~np.asarray(exclude, dtype=bool).reshape(-1)
            design = root[:, None] * self.samples.reshape(self.degree, -1).T
            coordinates, *_ = np.linalg.lstsq(design[keep], rhs[keep], rcond=None)
            remainder, scale = rhs[keep] - design[keep] @ coordinates, rhs[keep]
        norm = float(np.linalg.norm(scale))
        residual = float(np.linalg.norm(remainder)) / norm if norm > 0.0 else 0.0
        return coordinates, residual

    def quasi_periodicity_residual(self) -> float:
        """Worst relative defect of the automorphy law on boundary pairs."""

        axis = self.geometry.axes()
        tau = self.factor.tau
        bottom = axis + 0j
        left = axis * tau
        worst = 0.0
        checks = (
            (bottom, bottom + tau, self.factor.along_tau(bottom)),
            (left, left + 1.0, np.full(axis.shape, self.factor.along_one())),
        )
        for base, shifted, multiplier in checks:
            start = self.evaluate(base)
            end = self.evaluate(shifted)
            root = np.sqrt(self.factor.metric(shifted))
            defect = np.abs(end - multiplier * start) * root
            scale = max(float(np.max(np.abs(end) * root)), 1e-300)
            worst = max(worst, float(np.max(defect)) / scale)
        return worst


def theta_basis(
    geometry: TorusGeometry,
    degree: int,
    character: Character = TRIVIAL_CHARACTER,
    *,
    tolerances: Tolerances | None = None,
) -> ThetaBasis:
    """Sample the theta basis of ``M_χ ⊗ L_d`` on the grid and orthonormalise it."""

    if degree < 1:
        raise ValueError("theta bases exist for degree d >= 1")
    tolerances = tolerances or Tolerances()
    factor = AutomorphyFactor(degree=degree, tau=geometry.tau, character=character)
    z = geometry.mesh()
    samples = evaluate_sections(factor, z, tail=tolerances.theta_tail)
    weight = geometry.cell_weight * factor.metric(z)
    design = np.sqrt(weight).reshape(-1)[:, None] * samples.reshape(degree, -1).T
    orthonormal, triangular = np.linalg.qr(design)
    singular_values = np.linalg.svd(triangular, compute_uv=False)
    if singular_values[-1] < tolerances.singular_value * singular_values[0]:
        raise ThetaBasisError(
            f"theta basis of degree {degree} is numerically singular at N={geometry.grid} "
            f"(σ_min/σ_max = {singular_values[-1] / singular_values[0]:.3e}); increase N or truncation"
        )
    basis = ThetaBasis(
        factor=factor,
        geometry=geometry,
        samples=samples,
        weight=weight,
        orthonormal=orthonormal,
        triangular=triangular,
        singular_values=singular_values,
        tail=tolerances.theta_tail,
    )
    residual = basis.quasi_periodicity_residual()
    LOGGER.debug(
        "Theta basis d=%d χ=%s N=%d: σ_min/σ_max=%.3e quasi-periodicity=%.3e",
        degree,
        character,
        geometry.grid,
        singular_values[-1] / singular_values[0],
        residual,
    )
    if residual > tolerances.quasi_periodicity:
        raise ThetaBasisError(
            f"theta basis of degree {degree} violates its automorphy law (residual {residual:.3e})"
        )
    return basis


def require_projection(residual: float, tolerance: float, what: str) -> None:
    if residual > tolerance:
        raise ResidualError(f"{what}: projection residual {residual:.3e} exceeds {tolerance:.1e}")


__all__ = [
    "AutomorphyFactor",
    "ThetaBasis",
    "evaluate_sections",
    "require_projection",
    "theta_basis",
    "truncation_modes",
]
