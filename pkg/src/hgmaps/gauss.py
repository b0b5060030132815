"""Backend-generic Hodge–Gaussian map ``ρ``, its derivative form, ``μ2`` and pairings."""

from __future__ import annotations

import itertools
import logging
import math
from typing import Any, Sequence

import numpy as np

from .contract import Backend, GaussImage, WahlImage
from .exact.scalars import Scalar
from .relations import Multiset, SymmetricTensor, exponents, multisets, orderings

LOGGER = logging.getLogger(__name__)

Weights = dict[Multiset, Any]


def _check_orders(relation: SymmetricTensor, m: int) -> None:
    if not 0 < m <= relation.degree:
        raise ValueError(f"twist m={m} must satisfy 0 < m <= k={relation.degree}")


def section_weights(backend: Backend, relation: SymmetricTensor, m: int) -> dict[Multiset, Any]:
    """``C_T = Σ_S a_ST λ_S`` grouped by the multiset of ``T``.

    Ordered pairs ``(S, T)`` with the same multisets contribute
    ``#orderings(S)·#orderings(T)·a_{S∪T}``.
    """

    coefficients = relation.coefficients()
    weights: dict[Multiset, Any] = {}
    for outer in multisets(relation.size, m):
        total = None
        for inner in multisets(relation.size, relation.degree - m):
            joint = tuple(sorted(inner + outer))
            value = coefficients.get(joint)
            if value is None:
                continue
            factor = backend.scalar(orderings(inner) * orderings(outer), orderings(joint))
            term = backend.section_product(inner) * (value * factor)
            total = term if total is None else total + term
        if total is not None:
            weights[outer] = total
    return weights


def derivative_weights(backend: Backend, relation: SymmetricTensor, m: int) -> dict[Multiset, Any]:
    """``C_T = (m!(k-m)!/k!) (1/I!) (∂^I P)(λ)`` with ``I`` the exponent vector of ``T``.

    Numeric backends read ``(1/I!) ∂^I P(λ)`` off sampled values of ``P``
    instead, see :func:`_taylor_weights`.
    """

    if not backend.exact:
        return _taylor_weights(backend, relation, m)
    k, size = relation.degree, relation.size
    prefactor = (math.factorial(m), math.factorial(k - m), math.factorial(k))
    weights: dict[Multiset, Any] = {}
    for outer in multisets(size, m):
        index = exponents(outer, size)
        index_factorial = math.prod(math.factorial(i) for i in index)
        total = None
        for monomial, value in relation.terms:
            power = exponents(monomial, size)
            if any(e < i for e, i in zip(power, index)):
                continue
            falling = math.prod(math.factorial(e) // math.factorial(e - i) for e, i in zip(power, index))
            remaining = tuple(j for j, (e, i) in enumerate(zip(power, index)) for _ in range(e - i))
            factor = backend.scalar(prefactor[0] * prefactor[1] * falling, prefactor[2] * index_factorial)
            term = backend.section_product(remaining) * (value * factor)
            total = term if total is None else total + term
        if total is not None:
            weights[outer] = total
    return weights


def _evaluate(relation: SymmetricTensor, values: Sequence[np.ndarray]) -> np.ndarray:
    total = np.zeros_like(values[0])
    for monomial, coefficient in relation.terms:
        term = np.full_like(values[0], complex(coefficient))
        for index in monomial:
            term = term * values[index]
        total = total + term
    return total


def _taylor_weights(backend: Backend, relation: SymmetricTensor, m: int) -> dict[Multiset, Any]:
    """``C_T`` from the Taylor coefficient of ``t^I`` in ``P(λ + Σ t_j e_j)``.

    ``P`` has degree ``k`` in each ``t_j``, so averaging over the ``(k+1)``-th
    roots of unity extracts the coefficient without forming ``∂^I P``.
    """

    k, size = relation.degree, relation.size
    order = k + 1
    roots = np.exp(2j * np.pi * np.arange(order) / order)
    prefactor = math.factorial(m) * math.factorial(k - m) / math.factorial(k)
    sections = [backend.section_values(i) for i in range(size)]
    powers = [exponents(monomial, size) for monomial, _ in relation.terms]
    weights: dict[Multiset, Any] = {}
    for outer in multisets(size, m):
        index = exponents(outer, size)
        if not any(all(e >= i for e, i in zip(power, index)) for power in powers):
            continue
        support = [j for j, i in enumerate(index) if i]
        total = np.zeros_like(sections[0])
        for steps in itertools.product(range(order), repeat=len(support)):
            shifted = list(sections)
            phase = 1.0 + 0j
            for j, step in zip(support, steps):
                shifted[j] = sections[j] + roots[step]
                phase *= roots[step].conjugate() ** index[j]
            total = total + _evaluate(relation, shifted) * phase
        weights[outer] = total * (prefactor / order ** len(support))
    return weights


def _assemble(
    backend: Backend,
    relation: SymmetricTensor,
    xi: Any,
    m: int,
    weights: dict[Multiset, Any],
    *,
    strict: bool,
) -> GaussImage:
    sigma = None
    dbar_sigma = None
    decomposition_residual = 0.0
    aliasing = 0.0
    for outer, weight in weights.items():
        decomposition = backend.harmonic_decompose(backend.cup(xi, outer))
        decomposition_residual = max(decomposition_residual, decomposition.residual)
        aliasing = max(aliasing, decomposition.aliasing)
        term = backend.del_potential(decomposition) * weight
        sigma = term if sigma is None else sigma + term
        closing = backend.del_source(decomposition) * weight
        dbar_sigma = closing if dbar_sigma is None else dbar_sigma + closing
    if sigma is None:
        sigma = backend.zero_function()
    LOGGER.debug(
        "Assembled σ for k=%d m=%d from %d potentials (max decomposition residual %.3e)",
        relation.degree,
        m,
        len(weights),
        decomposition_residual,
    )
    return backend.extract_class(
        sigma,
        relation.degree - m,
        dbar_sigma=dbar_sigma,
        decomposition_residual=decomposition_residual,
        aliasing=aliasing,
        character=backend.form_character(xi),
        strict=strict,
    )


def gauss_rho(
    backend: Backend, relation: SymmetricTensor, xi: Any, m: int = 1, *, strict: bool = True
) -> GaussImage:
    """``ρ_P(ξ)``: the class of ``Σ a_ST λ_S ∂h_T`` where ``θ λ_T = γ_T + ∂̄h_T``."""

    _check_orders(relation, m)
    return _assemble(backend, relation, xi, m, section_weights(backend, relation, m), strict=strict)


def gauss_rho_derivative_form(
    backend: Backend, relation: SymmetricTensor, xi: Any, m: int = 1, *, strict: bool = True
) -> GaussImage:
    """``ρ_P(ξ)`` through partial derivatives of ``P`` viewed as a degree-k polynomial."""

    _check_orders(relation, m)
    return _assemble(backend, relation, xi, m, derivative_weights(backend, relation, m), strict=strict)


def multinomial_weights(size: int, m: int) -> dict[tuple[int, ...], int]:
    """Number of ordered ``T ∈ R_m`` per exponent vector; equals ``m!/I!``."""

    counts: dict[tuple[int, ...], int] = {}
    for outer in multisets(size, m):
        counts[exponents(outer, size)] = orderings(outer)
    return counts


def wahl_expression(backend: Backend, relation: SymmetricTensor) -> Any:
    """Chart expression ``Σ a_ij φ̈_i φ_j`` of ``μ2(Q)``."""

    if relation.degree != 2:
        raise ValueError("μ2 is defined on quadrics (k = 2)")
    total = None
    for (i, j), value in relation.terms:
        if i == j:
            term = backend.section_second_derivative(i) * backend.section_values(i) * value
        else:
            half = value * backend.scalar(1, 2)
            term = (
                backend.section_second_derivative(i) * backend.section_values(j)
                + backend.section_second_derivative(j) * backend.section_values(i)
            ) * half
        total = term if total is None else total + term
    if total is None:
        total = backend.section_values(0) * backend.zero_scalar()
    return total


def wahl_mu2(backend: Backend, relation: SymmetricTensor, *, strict: bool = True) -> WahlImage:
    return backend.wahl_class(wahl_expression(backend, relation), strict=strict)


def symmetry_pair(
    backend: Backend,
    relation: SymmetricTensor,
    xi: Any,
    eta: Any,
    *,
    strict: bool = True,
) -> tuple[Scalar, Scalar]:
    """``(ξ·ρ_Q(η), η·ρ_Q(ξ))`` for ``k = 2``; the two agree on curves."""

    if relation.degree != 2:
        raise ValueError("the symmetry pairing is stated for k = 2")
    first = backend.pair(xi, gauss_rho(backend, relation, eta, 1, strict=strict))
    second = backend.pair(eta, gauss_rho(backend, relation, xi, 1, strict=strict))
    return first, second


def lifting_ratio(
    backend: Backend, relation: SymmetricTensor, point: Any, *, strict: bool = True
) -> tuple[Scalar, Scalar, GaussImage]:
    """Numerator ``pair(ξ_P, ρ_Q(ξ_P))`` and denominator ``v_P(μ2(Q))`` of the lifting ratio."""

    image = gauss_rho(backend, relation, backend.schiffer(point, 1), 1, strict=strict)
    numerator = backend.pair(backend.schiffer(point, 1, dual=True), image)
    denominator = backend.evaluate_wahl(wahl_mu2(backend, relation, strict=strict), point)
    return numerator, denominator, image


__all__ = [
    "derivative_weights",
    "gauss_rho",
    "gauss_rho_derivative_form",
    "lifting_ratio",
    "multinomial_weights",
    "section_weights",
    "symmetry_pair",
    "wahl_expression",
    "wahl_mu2",
]
