"""Fourier ∂̄-Poisson solver and spectral derivatives on the flat torus.

With ``z = x + τy`` the Wirtinger operators in lattice coordinates are
``∂ = (τ̄ ∂_x - ∂_y)/(τ̄ - τ)`` and ``∂̄ = (∂_y - τ ∂_x)/(τ̄ - τ)``. On the mode
``e^{2πi(mx + ny)}`` they act by ``2πi(τ̄m - n)/(τ̄ - τ)`` and
``2πi(n - τm)/(τ̄ - τ)``. A flat character ``χ`` shifts ``(m, n)`` by ``χ``.
"""

from __future__ import annotations

import logging

import numpy as np

from ..contract import TRIVIAL_CHARACTER, HarmonicDecomposition, ResidualError
from .geometry import TorusGeometry

LOGGER = logging.getLogger(__name__)

Character = tuple[float, float]

_OUTER_BAND = 0.375


def is_trivial(character: Character) -> bool:
    return character[0] == 0.0 and character[1] == 0.0


def dbar_symbol(geometry: TorusGeometry, character: Character = TRIVIAL_CHARACTER) -> np.ndarray:
    tau = geometry.tau
    m, n = geometry.frequencies(character)
    return 2j * np.pi * (n - tau * m) / (tau.conjugate() - tau)


def del_symbol(geometry: TorusGeometry, character: Character = TRIVIAL_CHARACTER) -> np.ndarray:
    tau = geometry.tau
    m, n = geometry.frequencies(character)
    return 2j * np.pi * (tau.conjugate() * m - n) / (tau.conjugate() - tau)


def twist_phase(geometry: TorusGeometry, character: Character) -> np.ndarray:
    """``e^{2πi(χ1 x + χ2 y)}``: multiplies periodic data into the χ-twisted bundle."""

    if is_trivial(character):
        return np.ones((geometry.grid, geometry.grid), dtype=complex)
    x, y = geometry.lattice_mesh()
    return np.exp(2j * np.pi * (character[0] * x + character[1] * y))


def _apply(geometry: TorusGeometry, samples: np.ndarray, symbol: np.ndarray, character: Character) -> np.ndarray:
    if is_trivial(character):
        return np.fft.ifft2(np.fft.fft2(samples) * symbol)
    phase = twist_phase(geometry, character)
    return np.fft.ifft2(np.fft.fft2(samples * phase.conj()) * symbol) * phase


def del_grid(
    geometry: TorusGeometry, samples: np.ndarray, character: Character = TRIVIAL_CHARACTER
) -> np.ndarray:
    """Coefficient of ``dz`` in ``∂h``; exact on band-limited input."""

    return _apply(geometry, samples, del_symbol(geometry, character), character)


def dbar_grid(
    geometry: TorusGeometry, samples: np.ndarray, character: Character = TRIVIAL_CHARACTER
) -> np.ndarray:
    """Coefficient of ``dz̄`` in ``∂̄h``."""

    return _apply(geometry, samples, dbar_symbol(geometry, character), character)


def x_derivative(geometry: TorusGeometry, samples: np.ndarray, order: int = 1) -> np.ndarray:
    """``∂_x^order`` along the first axis; holomorphic sections satisfy ``∂_z = ∂_x``."""

    modes = np.fft.fftfreq(geometry.grid, d=1.0 / geometry.grid)
    multiplier = (2j * np.pi * modes) ** order
    if order % 2:
        multiplier[geometry.grid // 2] = 0.0
    return np.fft.ifft(np.fft.fft(samples, axis=0) * multiplier[:, None], axis=0)


def weighted_norm(geometry: TorusGeometry, samples: np.ndarray, weight: np.ndarray | None = None) -> float:
    """``L^2`` norm by grid quadrature, optionally against a pointwise metric weight."""

    density = np.abs(samples) ** 2
    if weight is not None:
        density = density * weight
    return float(np.sqrt(geometry.cell_weight * density.sum()))


def outer_band_energy(samples: np.ndarray) -> float:
    """Share of spectral energy with ``max(|m|, |n|) >= 3N/8``; tracks aliasing."""

    coefficients = np.fft.fft2(samples)
    total = float((np.abs(coefficients) ** 2).sum())
    if total == 0.0:
        return 0.0
    grid = samples.shape[0]
    modes = np.abs(np.fft.fftfreq(grid, d=1.0 / grid))
    outer = np.maximum(modes[:, None], modes[None, :]) >= _OUTER_BAND * grid
    return float(np.sqrt((np.abs(coefficients[outer]) ** 2).sum() / total))


def dbar_solve(
    geometry: TorusGeometry,
    samples: np.ndarray,
    character: Character = TRIVIAL_CHARACTER,
    *,
    tolerance: float | None = None,
) -> HarmonicDecomposition:
    """Split the ``dz̄`` coefficient ``ψ`` as ``γ + ∂̄h``.

    ``γ`` is the mean of ``ψ`` (the harmonic part) for the trivial character
    and zero otherwise; ``h`` has mean zero.
    """

    samples = np.asarray(samples, dtype=complex)
    trivial = is_trivial(character)
    phase = None if trivial else twist_phase(geometry, character)
    coefficients = np.fft.fft2(samples if trivial else samples * phase.conj())
    symbol = dbar_symbol(geometry, character)
    gamma = 0j
    if trivial:
        gamma = complex(coefficients[0, 0] / samples.size)
        coefficients[0, 0] = 0.0
        symbol[0, 0] = 1.0
    potential = np.fft.ifft2(coefficients / symbol)
    if not trivial:
        potential = potential * phase
    reconstructed = dbar_grid(geometry, potential, character) + gamma
    scale = weighted_norm(geometry, samples)
    defect = weighted_norm(geometry, reconstructed - samples)
    residual = defect / scale if scale > 0.0 else defect
    aliasing = outer_band_energy(samples if trivial else samples * phase.conj())
    LOGGER.debug("dbar_solve N=%d residual=%.3e aliasing=%.3e", geometry.grid, residual, aliasing)
    if tolerance is not None and residual > tolerance:
        raise ResidualError(
            f"∂̄ solve residual {residual:.3e} exceeds {tolerance:.1e} at N={geometry.grid}; raise N"
        )
    return HarmonicDecomposition(
        harmonic=gamma,
        potential=potential,
        source=samples,
        residual=residual,
        aliasing=aliasing,
    )


__all__ = [
    "dbar_grid",
    "dbar_solve",
    "dbar_symbol",
    "del_grid",
    "del_symbol",
    "is_trivial",
    "outer_band_energy",
    "twist_phase",
    "weighted_norm",
    "x_derivative",
]
