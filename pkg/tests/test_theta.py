"""Tests for theta bases and holomorphic projection on the torus."""

from __future__ import annotations

import numpy as np
import pytest

from hgmaps.contract import ResidualError
from hgmaps.torus.geometry import TorusGeometry
from hgmaps.torus.theta import AutomorphyFactor, require_projection, theta_basis


@pytest.mark.parametrize("character", [(0.0, 0.0), (0.5, 0.0), (0.25, 0.75)])
def test_theta_basis_obeys_its_automorphy_law(character: tuple[float, float]) -> None:
    basis = theta_basis(TorusGeometry(0.2 + 1.0j, 32), 3, character)
    assert basis.degree == 3
    assert basis.character == character
    assert basis.quasi_periodicity_residual() < 1e-10


def test_gram_matrix_is_hermitian_positive() -> None:
    basis = theta_basis(TorusGeometry(1j, 32), 4)
    gram = basis.gram()
    assert np.allclose(gram, gram.conj().T)
    assert np.all(np.linalg.eigvalsh(gram) > 0.0)


def test_projection_reproduces_basis_combinations() -> None:
    basis = theta_basis(TorusGeometry(1j, 32), 3)
    coordinates = np.array([1.0, -2.0 + 0.5j, 0.25j])
    recovered, residual = basis.project(basis.combine(coordinates))
    assert recovered == pytest.approx(coordinates, abs=1e-10)
    assert residual < 1e-10


def test_projection_residual_flags_non_holomorphic_data() -> None:
    geometry = TorusGeometry(1j, 32)
    basis = theta_basis(geometry, 2)
    _, residual = basis.project(np.conj(geometry.mesh()))
    assert residual > 1e-3
    with pytest.raises(ResidualError):
        require_projection(residual, 1e-6, "test data")


def test_evaluate_matches_grid_samples() -> None:
    geometry = TorusGeometry(1j, 16)
    basis = theta_basis(geometry, 2)
    point = geometry.mesh()[3, 5]
    values = basis.evaluate(np.array([point]))[:, 0]
    assert values == pytest.approx(basis.samples[:, 3, 5])


def test_automorphy_factor_serializes() -> None:
    factor = AutomorphyFactor(degree=2, tau=1j, character=(0.5, 0.0))
    assert factor.to_dict() == {"degree": 2, "tau": [0.0, 1.0], "character": [0.5, 0.0]}


def test_theta_basis_needs_positive_degree() -> None:
    with pytest.raises(ValueError):
        theta_basis(TorusGeometry(1j, 16), 0)
