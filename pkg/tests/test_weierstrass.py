"""Tests for ℘, the quasi-periods and the second-kind differential η."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hgmaps.torus.geometry import TorusGeometry
from hgmaps.torus.weierstrass import (
    eta_constant,
    eta_periods,
    eta_weierstrass,
    quasi_periods,
    weierstrass_p,
)


def test_legendre_relation() -> None:
    tau = 0.3 + 1.2j
    eta1, eta2 = quasi_periods(tau)
    assert tau * eta1 - eta2 == pytest.approx(2j * math.pi)


def test_square_lattice_quasi_periods() -> None:
    eta1, eta2 = quasi_periods(1j)
    assert eta1 == pytest.approx(math.pi)
    assert eta2 == pytest.approx(-1j * math.pi)
    assert abs(eta_constant(1j)) < 1e-10


def test_weierstrass_p_on_the_square_lattice() -> None:
    values = weierstrass_p(1j, np.array([0.5 + 0.5j, 0.01, 0.5, 0.5j]))
    assert abs(values[0]) < 1e-9
    assert values[1] * 0.01**2 == pytest.approx(1.0, rel=1e-6)
    assert values[3] == pytest.approx(-values[2])


def test_weierstrass_p_is_periodic() -> None:
    tau = 0.3 + 1.2j
    w = np.array([0.21 + 0.37j])
    base = weierstrass_p(tau, w)
    assert weierstrass_p(tau, w + 1.0) == pytest.approx(base)
    assert weierstrass_p(tau, w + tau) == pytest.approx(base)


def test_eta_periods_are_of_type_zero_one() -> None:
    geometry = TorusGeometry(0.3 + 1.2j, 64)
    pole = geometry.from_lattice(0.5, 0.5)
    _, _, defect = eta_periods(geometry, pole)
    assert defect < 1e-8


def test_eta_grid_carries_the_constant() -> None:
    geometry = TorusGeometry(1j, 16)
    eta = eta_weierstrass(geometry, 0.5 + 0.5j)
    assert eta.samples.shape == (16, 16)
    assert eta.pole == 0.5 + 0.5j
    assert eta.constant == pytest.approx(eta_constant(1j))
