"""Tests for the exact projective-line backend."""

from __future__ import annotations

import pytest

from hgmaps.contract import BackendError, ResidualError
from hgmaps.exact import ONE, ZERO, Polynomial, gaussian, parse_gaussian, polynomial
from hgmaps.gauss import gauss_rho, lifting_ratio, symmetry_pair, wahl_mu2
from hgmaps.p1 import P1Backend, harmonic_decompose_p1, schiffer_span
from hgmaps.relations import SymmetricTensor, relation_space

POINTS = ["0", "1", "-1", "2", "1/2", "-2", "1+i"]


def _conic(backend: P1Backend) -> SymmetricTensor:
    return relation_space(backend, 2).element(0)


@pytest.mark.parametrize("literal", POINTS)
def test_conic_image_is_one_half(literal: str) -> None:
    backend = P1Backend(2)
    point = parse_gaussian(literal)
    image = gauss_rho(backend, _conic(backend), backend.schiffer(point))
    assert image.exact
    assert image.power == 1
    assert image.coordinates == (gaussian("1/2"),)
    assert image.closedness_residual == 0.0


def test_lifting_ratio_of_conic() -> None:
    backend = P1Backend(2)
    numerator, denominator, _ = lifting_ratio(backend, _conic(backend), gaussian(3))
    assert numerator == gaussian("1/2")
    assert denominator == ONE
    assert wahl_mu2(backend, _conic(backend)).coordinates == (ONE,)


@pytest.mark.parametrize("degree", [3, 4, 5, 6])
def test_lifting_ratio_is_constant(degree: int) -> None:
    backend = P1Backend(degree)
    ratios = set()
    for relation in relation_space(backend, 2).basis:
        for literal in POINTS:
            numerator, denominator, _ = lifting_ratio(backend, relation, parse_gaussian(literal))
            if denominator:
                ratios.add(numerator / denominator)
    assert ratios == {gaussian("1/2")}


def test_closed_form_matches_solver_path() -> None:
    backend = P1Backend(3)
    for relation in relation_space(backend, 2).basis:
        for literal in ("0", "1/2", "-1+2i"):
            point = parse_gaussian(literal)
            solver = gauss_rho(backend, relation, backend.schiffer(point))
            closed = backend.closed_form_rho(relation, point)
            assert solver.coordinates == closed.coordinates


def test_closed_form_rejects_non_relations() -> None:
    backend = P1Backend(2)
    product = SymmetricTensor.from_coefficients(2, 3, {(0, 1): ONE}, exact=True)
    with pytest.raises(BackendError, match="not in I_2"):
        backend.closed_form_rho(product, ZERO)


def test_non_relation_fails_closedness() -> None:
    backend = P1Backend(2)
    product = SymmetricTensor.from_coefficients(2, 3, {(0, 1): ONE}, exact=True)
    with pytest.raises(ResidualError, match="closed"):
        gauss_rho(backend, product, backend.schiffer(gaussian(1)))
    with pytest.raises(ResidualError, match="holomorphic"):
        gauss_rho(backend, product, backend.schiffer(ZERO), strict=False)


def test_symmetry_pairing_agrees() -> None:
    backend = P1Backend(3)
    xi, eta = backend.schiffer(gaussian(1)), backend.schiffer(gaussian("-1/2"))
    for relation in relation_space(backend, 2).basis:
        first, second = symmetry_pair(backend, relation, xi, eta)
        assert first == second


def test_exact_perturbation_does_not_change_the_image() -> None:
    backend = P1Backend(3)
    relation = _conic(backend)
    point = gaussian(2)
    xi = backend.schiffer(point)
    shifted = xi + backend.perturbation(point, polynomial([1, -2, 3]))
    assert gauss_rho(backend, relation, shifted) == gauss_rho(backend, relation, xi)


def test_basis_change_keeps_the_lifting_ratio() -> None:
    z = Polynomial.monomial(1)
    sections = [(z + 1) ** i * (z - 2) ** (2 - i) for i in range(3)]
    backend = P1Backend(2).with_basis(sections)
    relation = _conic(backend)
    numerator, denominator, _ = lifting_ratio(backend, relation, gaussian(5))
    assert numerator / denominator == gaussian("1/2")


def test_dependent_sections_are_rejected() -> None:
    z = Polynomial.monomial(1)
    with pytest.raises(ValueError, match="linearly dependent"):
        P1Backend(1, [z, z * 2])
    with pytest.raises(ValueError):
        P1Backend(1, [Polynomial.constant(1)])


def test_harmonic_decomposition_rejects_twisted_forms() -> None:
    backend = P1Backend(2)
    with pytest.raises(ValueError):
        harmonic_decompose_p1(backend.schiffer(ZERO))


def test_schiffer_span_needs_md_minus_one_points() -> None:
    backend = P1Backend(3)
    span = schiffer_span(backend, [ZERO, ONE], [ONE, gaussian(2)])
    assert len(span.terms) == 2
    with pytest.raises(ValueError):
        schiffer_span(backend, [ZERO], [ONE])
    with pytest.raises(ValueError, match="singular"):
        schiffer_span(backend, [ONE, ONE], [ONE, ONE])


def test_pairing_is_evaluation_at_the_point() -> None:
    backend = P1Backend(4)
    relation = relation_space(backend, 2).element(1)
    point = gaussian("1/3")
    image = gauss_rho(backend, relation, backend.schiffer(point))
    differential = backend.differential(image)
    assert backend.pair(backend.schiffer(point), image) == differential(point)
