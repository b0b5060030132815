"""Tests for relation spaces and symmetric tensors."""

from __future__ import annotations

from math import comb

import pytest

from hgmaps.exact import ONE, gaussian
from hgmaps.p1 import P1Backend
from hgmaps.relations import (
    RelationSpaceEmptyError,
    SymmetricTensor,
    combine,
    multisets,
    orderings,
    relation_space,
)


def _conic() -> SymmetricTensor:
    return SymmetricTensor.from_coefficients(2, 3, {(0, 2): ONE, (1, 1): -ONE}, exact=True)


def test_multisets_and_orderings() -> None:
    assert multisets(3, 2) == [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
    assert orderings((0, 0, 1)) == 3
    assert orderings((0, 1, 2)) == 6
    assert orderings((1, 1)) == 1


def test_tensor_entries_follow_weight_convention() -> None:
    conic = _conic()
    assert conic.entry((0, 2)) == gaussian("1/2")
    assert conic.entry((2, 0)) == gaussian("1/2")
    assert conic.entry((1, 1)) == gaussian(-1)
    assert conic.entry((0, 0)) == gaussian(0)
    assert str(conic) == "(1)*x0*x2 + (-1)*x1^2"


def test_from_entries_symmetrizes() -> None:
    tensor = SymmetricTensor.from_entries(
        2, 3, {(0, 2): gaussian("1/2"), (2, 0): gaussian("1/2"), (1, 1): -ONE}, exact=True
    )
    assert tensor == _conic()


def test_change_basis_identity_and_swap() -> None:
    conic = _conic()
    identity = [[ONE if i == j else gaussian(0) for j in range(3)] for i in range(3)]
    assert conic.change_basis(identity) == conic
    swap = [[gaussian(0), gaussian(0), ONE], [gaussian(0), ONE, gaussian(0)], [ONE, gaussian(0), gaussian(0)]]
    assert conic.change_basis(swap) == conic


def test_p1_conic_is_the_only_quadric() -> None:
    space = relation_space(P1Backend(2), 2)
    assert space.dimension == 1
    assert space.element(0) == _conic()
    assert space.provenance == {"backend": "p1", "rows": 5, "cols": 6, "rank": 5, "gap": float("inf")}


@pytest.mark.parametrize("degree", [1, 2, 3, 4, 5])
def test_p1_quadric_count(degree: int) -> None:
    space = relation_space(P1Backend(degree), 2)
    assert space.dimension == degree * (degree - 1) // 2


@pytest.mark.parametrize("degree", [2, 3])
def test_p1_cubic_count(degree: int) -> None:
    space = relation_space(P1Backend(degree), 3)
    assert space.dimension == comb(degree + 3, 3) - (3 * degree + 1)


def test_empty_relation_space_raises_on_access() -> None:
    space = relation_space(P1Backend(1), 2)
    assert space.dimension == 0
    with pytest.raises(RelationSpaceEmptyError):
        space.element(0)
    with pytest.raises(RelationSpaceEmptyError):
        combine(space.basis, [])


def test_relation_index_out_of_range() -> None:
    space = relation_space(P1Backend(3), 2)
    with pytest.raises(ValueError):
        space.element(space.dimension)


def test_relation_degree_must_be_positive() -> None:
    with pytest.raises(ValueError):
        relation_space(P1Backend(2), 0)


def test_combination_of_relations_is_a_relation() -> None:
    backend = P1Backend(3)
    space = relation_space(backend, 2)
    mixed = combine(space.basis, [ONE, gaussian(2, -1), gaussian("1/3")])
    assert backend.relation_residual(mixed.coefficients()) == 0.0
    assert mixed.to_dict()["degree"] == 2
