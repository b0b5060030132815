"""Tests for the backend-generic Hodge–Gaussian construction."""

from __future__ import annotations

import numpy as np
import pytest

from hgmaps.exact import gaussian
from hgmaps.gauss import (
    derivative_weights,
    gauss_rho,
    gauss_rho_derivative_form,
    multinomial_weights,
    section_weights,
    symmetry_pair,
    wahl_expression,
)
from hgmaps.p1 import P1Backend
from hgmaps.relations import relation_space
from hgmaps.torus import TorusBackend, TorusGeometry
from hgmaps.verify import DERIVATIVE_FIXTURES, closedness_identity


@pytest.mark.parametrize(("k", "m"), DERIVATIVE_FIXTURES)
def test_derivative_form_matches_weights(k: int, m: int) -> None:
    backend = P1Backend(3)
    point = gaussian("1/2")
    xi = backend.schiffer(point, m)
    for relation in relation_space(backend, k).basis[:2]:
        direct = gauss_rho(backend, relation, xi, m)
        derived = gauss_rho_derivative_form(backend, relation, xi, m)
        assert direct == derived
        assert direct.power == k - m


@pytest.mark.parametrize(("k", "m"), [(2, 1), (3, 1), (3, 2)])
def test_closedness_identity_vanishes_on_relations(k: int, m: int) -> None:
    backend = P1Backend(3)
    for relation in relation_space(backend, k).basis:
        assert closedness_identity(backend, relation, m).is_zero()


def test_twist_must_lie_between_one_and_k() -> None:
    backend = P1Backend(2)
    relation = relation_space(backend, 2).element(0)
    with pytest.raises(ValueError):
        gauss_rho(backend, relation, backend.schiffer(gaussian(0)), 0)
    with pytest.raises(ValueError):
        gauss_rho(backend, relation, backend.schiffer(gaussian(0)), 3)


def test_wahl_and_symmetry_need_quadrics() -> None:
    backend = P1Backend(2)
    cubic = relation_space(backend, 3).element(0)
    xi = backend.schiffer(gaussian(1))
    with pytest.raises(ValueError):
        wahl_expression(backend, cubic)
    with pytest.raises(ValueError):
        symmetry_pair(backend, cubic, xi, xi)


def test_multinomial_weights_count_orderings() -> None:
    weights = multinomial_weights(3, 2)
    assert weights[(2, 0, 0)] == 1
    assert weights[(1, 1, 0)] == 2
    assert sum(weights.values()) == 9


@pytest.mark.parametrize(("k", "m"), [(2, 1), (3, 1), (3, 2)])
def test_sampled_taylor_weights_match_section_weights(k: int, m: int) -> None:
    backend = TorusBackend(TorusGeometry(1j, 64), 4)
    relation = relation_space(backend, k).element(0)
    direct = section_weights(backend, relation, m)
    sampled = derivative_weights(backend, relation, m)
    assert set(sampled) <= set(direct)
    scale = max(float(np.max(np.abs(weight))) for weight in direct.values())
    for outer, weight in direct.items():
        assert np.max(np.abs(sampled.get(outer, 0.0) - weight)) < 1e-10 * scale
