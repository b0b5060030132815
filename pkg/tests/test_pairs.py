"""Tests for relations between split bundles on the projective line."""

from __future__ import annotations

import pytest

from hgmaps.exact import gaussian
from hgmaps.gauss import gauss_rho
from hgmaps.p1 import P1Backend
from hgmaps.pairs import (
    PairTensor,
    SplitBundle,
    pair_relation_space,
    rho_pair,
    schiffer_components,
    vanishes_to_order_two,
)
from hgmaps.relations import relation_space


def test_split_bundle_parse() -> None:
    bundle = SplitBundle.parse("2, 1")
    assert bundle.degrees == (2, 1)
    assert bundle.h0() == 5
    assert str(bundle) == "O(2) + O(1)"
    with pytest.raises(ValueError):
        SplitBundle.parse("2,x")
    with pytest.raises(ValueError):
        SplitBundle.parse("")
    with pytest.raises(ValueError):
        SplitBundle.parse("-1")


@pytest.mark.parametrize(("a", "b"), [(1, 1), (2, 2), (3, 2), (2, 3), (3, 3), (1, 4)])
def test_line_bundle_pairs_match_diagonal_count(a: int, b: int) -> None:
    space = pair_relation_space(SplitBundle((a,)), SplitBundle((b,)))
    assert space.dimension == (a - 1) * (b - 1)
    assert space.rank == (a + 1) * (b + 1) - space.dimension
    for tensor in space.basis:
        assert vanishes_to_order_two(tensor)


def test_split_source_adds_blocks() -> None:
    space = pair_relation_space(SplitBundle((2, 1)), SplitBundle((2,)))
    assert space.dimension == 1
    assert space.to_dict()["source"] == [2, 1]


def test_symmetric_quadric_embeds() -> None:
    backend = P1Backend(2)
    conic = relation_space(backend, 2).element(0)
    tensor = PairTensor.from_symmetric(conic)
    assert vanishes_to_order_two(tensor)

    point = gaussian("1/2")
    image = rho_pair(tensor, schiffer_components(tensor.source, [point]))
    direct = gauss_rho(backend, conic, backend.schiffer(point))
    assert len(image.components) == 1
    assert image.components[0].coordinates == direct.coordinates


def test_missing_point_leaves_a_zero_summand() -> None:
    source = SplitBundle((2, 2))
    space = pair_relation_space(source, SplitBundle((2,)))
    assert space.dimension == 2
    xi = schiffer_components(source, [gaussian(1), None])
    assert xi[1].is_zero()
    image = rho_pair(space.basis[0], xi)
    assert image.to_dict()["components"][0]["power"] == 1
    with pytest.raises(ValueError):
        schiffer_components(source, [gaussian(1)])
