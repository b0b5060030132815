"""Tests for the exact Gaussian-rational layer."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from hgmaps.exact import (
    ONE,
    ZERO,
    ExactMatrix,
    Polynomial,
    RationalFunction,
    exact_kernel,
    exact_rank,
    format_gaussian,
    gaussian,
    parse_complex,
    parse_gaussian,
    partial_fractions,
    polynomial,
    ratio,
    residue,
)
from hgmaps.exact.scalars import GaussianRational, parse_parts


def test_parse_gaussian_accepts_rational_parts() -> None:
    assert parse_gaussian("1/2-3/4i") == gaussian("1/2", "-3/4")
    assert parse_gaussian("-2") == gaussian(-2)
    assert parse_gaussian("i") == gaussian(0, 1)
    assert parse_gaussian("3 - i") == gaussian(3, -1)


def test_parse_gaussian_rejects_decimals() -> None:
    with pytest.raises(ValueError):
        parse_gaussian("0.5")
    with pytest.raises(ValueError):
        parse_gaussian("abc")


def test_parse_complex_handles_exponents() -> None:
    assert parse_complex("0.5+1e-3i") == pytest.approx(0.5 + 0.001j)
    assert parse_complex("0+1i") == 1j
    _, _, decimal = parse_parts("1e-2")
    assert decimal


def test_format_gaussian_matches_parser_grammar() -> None:
    assert format_gaussian(gaussian("1/2")) == "1/2"
    assert format_gaussian(gaussian(1, -1)) == "1-i"
    assert format_gaussian(gaussian(0, 2)) == "2i"
    assert format_gaussian(gaussian("-1/3", "2/5")) == "-1/3+2/5i"
    assert parse_gaussian(format_gaussian(gaussian("7/3", "-5/2"))) == gaussian("7/3", "-5/2")


def test_ratio_rejects_zero_denominator() -> None:
    with pytest.raises(ZeroDivisionError):
        ratio(1, 0)


def test_polynomial_arithmetic_and_evaluation() -> None:
    z = Polynomial.monomial(1)
    product = (z - 1) * (z + 1)
    assert product == polynomial([-1, 0, 1])
    assert product.degree == 2
    assert product(gaussian(0, 1)) == gaussian(-2)
    assert product.derivative() == polynomial([0, 2])
    assert product.shift(ONE) == polynomial([0, 2, 1])
    assert product.exact_quotient(z - 1) == z + 1
    assert Polynomial().degree == -1
    assert str(product) == "-1 + z^2"


def test_exact_quotient_rejects_remainders() -> None:
    z = Polynomial.monomial(1)
    with pytest.raises(ValueError):
        (z * z + 1).exact_quotient(z - 1)


def test_series_inverse_truncates() -> None:
    one_minus_z = polynomial([1, -1])
    assert one_minus_z.series_inverse(4) == polynomial([1, 1, 1, 1])
    with pytest.raises(ValueError):
        Polynomial.monomial(1).series_inverse(3)


def test_rational_function_is_reduced_and_monic() -> None:
    z = Polynomial.monomial(1)
    f = RationalFunction(z * z - 1, (z - 1) * 2)
    assert f.is_polynomial()
    assert f.as_polynomial() == polynomial([ratio(1, 2), ratio(1, 2)])

    g = RationalFunction(Polynomial.constant(3), z * 3 - 6)
    assert g.denominator == Polynomial.linear(gaussian(2))
    assert g(ZERO) == gaussian("-1/2")
    with pytest.raises(ZeroDivisionError):
        g(gaussian(2))


def test_partial_fractions_at_double_pole() -> None:
    z = Polynomial.monomial(1)
    f = RationalFunction(Polynomial.constant(1), z * z * (z - 1))
    principal = partial_fractions(f, ZERO)
    assert principal.order == 2
    assert principal.coefficients == (gaussian(-1), gaussian(-1))
    assert principal.regular_value == gaussian(-1)
    assert residue(f, ONE) == ONE
    remainder = f - principal.as_rational()
    assert remainder.is_regular_at(ZERO)


def test_partial_fractions_of_regular_function_is_empty() -> None:
    principal = partial_fractions(RationalFunction.constant(5), ZERO)
    assert principal.order == 0
    assert principal.residue == ZERO


def test_exact_kernel_and_rank() -> None:
    matrix = ExactMatrix.from_rows([[1, 1], [2, 2]])
    assert exact_rank(matrix) == 1
    assert exact_kernel(matrix) == [(ONE, -ONE)]
    assert exact_kernel(ExactMatrix.identity(3)) == []


def test_matrix_inverse_and_product() -> None:
    matrix = ExactMatrix.from_rows([[1, 2], [3, 4]])
    inverse = matrix.inverse()
    assert inverse.entries == (
        (gaussian(-2), gaussian(1)),
        (gaussian("3/2"), gaussian("-1/2")),
    )
    assert matrix @ inverse == ExactMatrix.identity(2)
    with pytest.raises(ValueError):
        ExactMatrix.from_rows([[1, 2], [2, 4]]).inverse()


def test_from_columns_checks_lengths() -> None:
    with pytest.raises(ValueError):
        ExactMatrix.from_columns([[1, 2], [3]], rows=2)


def _random_scalar(rng: random.Random, spread: int = 4) -> GaussianRational:
    real = Fraction(rng.randint(-spread, spread), rng.randint(1, 3))
    imag = Fraction(rng.randint(-spread, spread), rng.randint(1, 3))
    return gaussian(real, imag)


def _random_polynomial(rng: random.Random) -> Polynomial:
    return Polynomial(tuple(_random_scalar(rng) for _ in range(rng.randint(0, 4))))


@pytest.mark.parametrize("seed", range(5))
def test_polynomial_ring_axioms(seed: int) -> None:
    rng = random.Random(seed)
    p, q, r = (_random_polynomial(rng) for _ in range(3))
    zero = Polynomial()
    one = Polynomial.constant(1)
    assert p + q == q + p
    assert (p + q) + r == p + (q + r)
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + zero == p
    assert p * one == p
    assert (p - p).is_zero()
    assert p * zero == zero


@pytest.mark.parametrize("seed", range(5))
def test_derivative_obeys_leibniz(seed: int) -> None:
    rng = random.Random(100 + seed)
    p, q = _random_polynomial(rng), _random_polynomial(rng)
    assert (p * q).derivative() == p.derivative() * q + p * q.derivative()
    cross = p.derivative().scale(2) * q.derivative()
    assert (p * q).derivative(2) == p.derivative(2) * q + cross + p * q.derivative(2)
    point = _random_scalar(rng)
    assert (p * q)(point) == p(point) * q(point)


def _determinant(rows: list[list[GaussianRational]]) -> GaussianRational:
    if len(rows) == 1:
        return rows[0][0]
    total = ZERO
    for column, value in enumerate(rows[0]):
        if not value:
            continue
        minor = [row[:column] + row[column + 1 :] for row in rows[1:]]
        term = value * _determinant(minor)
        total = total + term if column % 2 == 0 else total - term
    return total


def _minor_rank(entries: list[list[GaussianRational]]) -> int:
    rows, cols = len(entries), len(entries[0])
    for size in range(min(rows, cols), 0, -1):
        for chosen_rows in itertools.combinations(range(rows), size):
            for chosen_cols in itertools.combinations(range(cols), size):
                if _determinant([[entries[r][c] for c in chosen_cols] for r in chosen_rows]):
                    return size
    return 0


@pytest.mark.parametrize("seed", range(8))
def test_rank_and_kernel_agree_with_minors(seed: int) -> None:
    rng = random.Random(200 + seed)
    rows, cols, inner = rng.randint(2, 4), rng.randint(2, 4), rng.randint(1, 3)
    left = [[_random_scalar(rng, 2) for _ in range(inner)] for _ in range(rows)]
    right = [[_random_scalar(rng, 2) for _ in range(cols)] for _ in range(inner)]
    entries = [
        [sum((left[r][j] * right[j][c] for j in range(inner)), ZERO) for c in range(cols)] for r in range(rows)
    ]
    matrix = ExactMatrix.from_rows(entries)
    rank = _minor_rank(entries)
    assert rank <= inner
    assert exact_rank(matrix) == rank
    kernel = exact_kernel(matrix)
    assert len(kernel) == cols - rank
    for vector in kernel:
        assert all(value == ZERO for value in matrix.apply(vector))
    if kernel:
        assert exact_rank(ExactMatrix.from_rows([list(v) for v in kernel])) == len(kernel)
