"""Weierstrass ``℘``, quasi-periods and the differential ``η`` with a double pole at ``P``."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .geometry import TorusGeometry

LOGGER = logging.getLogger(__name__)


def quasi_periods(tau: complex, *, precision: int = 30) -> tuple[complex, complex]:
    """``(η1, η2)`` with ``ζ(z+1) = ζ(z) + η1`` and ``ζ(z+τ) = ζ(z) + η2``.

    ``η1 = -(π^2/3) θ1'''(0)/θ1'(0)`` for the nome ``q = e^{iπτ}``; ``η2`` follows
    from Legendre's relation ``τη1 - η2 = 2πi``.
    """

    with mpmath.workdps(precision):
        tau_mp = mpmath.mpc(tau.real, tau.imag)
        nome = mpmath.exp(1j * mpmath.pi * tau_mp)
        first = mpmath.jtheta(1, 0, nome, 1)
        third = mpmath.jtheta(1, 0, nome, 3)
        eta1 = -(mpmath.pi**2 / 3) * third / first
        eta2 = tau_mp * eta1 - 2j * mpmath.pi
        return complex(eta1), complex(eta2)


def eta_constant(tau: complex) -> complex:
    """``c = (η1 τ̄ - η2)/(τ̄ - τ)``, which makes ``(℘ + c)dz`` of type (0,1) in cohomology."""

    eta1, eta2 = quasi_periods(tau)
    return (eta1 * tau.conjugate() - eta2) / (tau.conjugate() - tau)


def _series_length(tau: complex) -> int:
    return int(math.ceil(math.sqrt(45.0 / (math.pi * tau.imag)))) + 3


def weierstrass_p(tau: complex, w: np.ndarray, eta1: complex | None = None) -> np.ndarray:
    """``℘(w)`` for the lattice ``Z + τZ`` through the Jacobi ``θ1`` series.

    ``℘(w) = π^2 [(θ1'/θ1)^2 - θ1''/θ1](πw) - η1``; ``w`` is first reduced to
    the cell centred at the origin.
    """

    if eta1 is None:
        eta1 = quasi_periods(tau)[0]
    w = np.asarray(w, dtype=complex)
    y = w.imag / tau.imag
    x = w.real - tau.real * y
    w = w - np.round(x) - np.round(y) * tau
    v = np.pi * w
    theta = np.zeros_like(v)
    first = np.zeros_like(v)
    second = np.zeros_like(v)
    for n in range(_series_length(tau)):
        odd = 2 * n + 1
        weight = (-1) ** n * np.exp(1j * np.pi * tau * (n + 0.5) ** 2)
        sine = np.sin(odd * v)
        theta += weight * sine
        first += weight * odd * np.cos(odd * v)
        second -= weight * odd * odd * sine
    with np.errstate(divide="ignore", invalid="ignore"):
        log_derivative = first / theta
        return np.pi**2 * (log_derivative**2 - second / theta) - eta1


@dataclass(frozen=True, slots=True)
class EtaGrid:
    """Samples of ``η = -(℘(z-P) + c) dz``; principal coefficient -1 like the genus-0 ``η``."""

    pole: complex
    constant: complex
    samples: np.ndarray


def eta_weierstrass(geometry: TorusGeometry, pole: complex) -> EtaGrid:
    tau = geometry.tau
    eta1, _ = quasi_periods(tau)
    constant = eta_constant(tau)
    values = weierstrass_p(tau, geometry.mesh() - complex(pole), eta1)
    LOGGER.debug("η at P=%s: c=%s", pole, constant)
    return EtaGrid(pole=complex(pole), constant=constant, samples=-(values + constant))


def eta_values(geometry: TorusGeometry, pole: complex, points: np.ndarray) -> np.ndarray:
    tau = geometry.tau
    eta1, _ = quasi_periods(tau)
    return -(weierstrass_p(tau, np.asarray(points) - complex(pole), eta1) + eta_constant(tau))


def eta_periods(geometry: TorusGeometry, pole: complex, samples: int = 512) -> tuple[complex, complex, float]:
    """a- and b-periods of ``η`` by trapezoid quadrature along cycles away from ``P``.

    Returns ``(A, B, defect)`` with ``defect = |B - τ̄A| / max(|A|, |B|)``; a class
    of type (0,1) has periods proportional to those of ``dz̄``, namely ``(1, τ̄)``.
    """

    tau = geometry.tau
    x_pole, y_pole = geometry.to_lattice(pole)
    t = np.arange(samples) / samples
    a_path = (y_pole + 0.5) % 1.0 * tau + t
    b_path = (x_pole + 0.5) % 1.0 + t * tau
    a_period = complex(eta_values(geometry, pole, a_path).mean())
    b_period = complex(eta_values(geometry, pole, b_path).mean() * tau)
    scale = max(abs(a_period), abs(b_period))
    defect = abs(b_period - tau.conjugate() * a_period) / scale if scale > 0 else 0.0
    return a_period, b_period, defect


__all__ = [
    "EtaGrid",
    "eta_constant",
    "eta_periods",
    "eta_values",
    "eta_weierstrass",
    "quasi_periods",
    "weierstrass_p",
]
