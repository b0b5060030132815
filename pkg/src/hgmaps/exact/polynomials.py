"""Univariate polynomials and rational functions over the Gaussian rationals.

Coefficients are stored lowest degree first. Arithmetic is delegated to
sympy's dense univariate helpers (``dup_*``), which expect highest degree
first, so every call reverses on the way in and out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from sympy.polys.densearith import dup_add, dup_div, dup_mul, dup_mul_ground, dup_neg, dup_sub
from sympy.polys.densebasic import dup_strip
from sympy.polys.densetools import dup_diff, dup_eval, dup_revert, dup_shift
from sympy.polys.domains import QQ_I
from sympy.polys.euclidtools import dup_inner_gcd

from .scalars import ONE, ZERO, GaussianRational, format_gaussian

K = QQ_I

Coefficient = Union[GaussianRational, int]


def _coerce_scalar(value: Coefficient) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, int):
        return K(value)
    raise TypeError(f"unsupported coefficient type {type(value).__name__}")


@dataclass(frozen=True, slots=True)
class Polynomial:
    """Polynomial in the affine chart coordinate ``z``."""

    coefficients: tuple[GaussianRational, ...] = ()

    def __post_init__(self) -> None:
        coefficients = tuple(_coerce_scalar(c) for c in self.coefficients)
        end = len(coefficients)
        while end and not coefficients[end - 1]:
            end -= 1
        object.__setattr__(self, "coefficients", coefficients[:end])

    # -- construction -------------------------------------------------

    @classmethod
    def from_dense(cls, dense: Sequence[GaussianRational]) -> "Polynomial":
        return cls(tuple(reversed(dup_strip(list(dense)))))

    @classmethod
    def constant(cls, value: Coefficient) -> "Polynomial":
        return cls((_coerce_scalar(value),))

    @classmethod
    def monomial(cls, power: int, coefficient: Coefficient = 1) -> "Polynomial":
        if power < 0:
            raise ValueError("monomial power must be non-negative")
        return cls((ZERO,) * power + (_coerce_scalar(coefficient),))

    @classmethod
    def linear(cls, root: GaussianRational) -> "Polynomial":
        """The monic polynomial ``z - root``."""

        return cls((-root, ONE))

    # -- queries ------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""

        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def coefficient(self, power: int) -> GaussianRational:
        if 0 <= power < len(self.coefficients):
            return self.coefficients[power]
        return ZERO

    def leading_coefficient(self) -> GaussianRational:
        return self.coefficients[-1] if self.coefficients else ZERO

    def dense(self) -> list[GaussianRational]:
        return list(reversed(self.coefficients))

    def order_at_zero(self) -> int:
        """Multiplicity of ``z = 0`` as a root (``-1`` for the zero polynomial)."""

        for power, value in enumerate(self.coefficients):
            if value:
                return power
        return -1

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: object) -> "Polynomial":
        if isinstance(other, (int, GaussianRational)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return Polynomial.from_dense(dup_add(self.dense(), other.dense(), K))

    __radd__ = __add__

    def __sub__(self, other: object) -> "Polynomial":
        if isinstance(other, (int, GaussianRational)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return Polynomial.from_dense(dup_sub(self.dense(), other.dense(), K))

    def __rsub__(self, other: object) -> "Polynomial":
        if isinstance(other, (int, GaussianRational)):
            return Polynomial.constant(other) - self
        return NotImplemented

    def __neg__(self) -> "Polynomial":
        return Polynomial.from_dense(dup_neg(self.dense(), K))

    def __mul__(self, other: object) -> "Polynomial":
        if isinstance(other, (int, GaussianRational)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return Polynomial.from_dense(dup_mul(self.dense(), other.dense(), K))

    def __rmul__(self, other: object) -> "Polynomial":
        if isinstance(other, (int, GaussianRational)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, factor: Coefficient) -> "Polynomial":
        return Polynomial.from_dense(dup_mul_ground(self.dense(), _coerce_scalar(factor), K))

    def derivative(self, order: int = 1) -> "Polynomial":
        """Formal derivative of the given order."""

        if order == 0 or self.is_zero():
            return self
        return Polynomial.from_dense(dup_diff(self.dense(), order, K))

    def __call__(self, value: Coefficient) -> GaussianRational:
        if self.is_zero():
            return ZERO
        return dup_eval(self.dense(), _coerce_scalar(value), K)

    def shift(self, offset: GaussianRational) -> "Polynomial":
        """Return ``p(z + offset)``."""

        if self.is_zero():
            return self
        return Polynomial.from_dense(dup_shift(self.dense(), _coerce_scalar(offset), K))

    def divmod(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        quotient, remainder = dup_div(self.dense(), divisor.dense(), K)
        return Polynomial.from_dense(quotient), Polynomial.from_dense(remainder)

    def exact_quotient(self, divisor: "Polynomial") -> "Polynomial":
        """Divide by ``divisor``; a nonzero remainder raises :class:`ValueError`."""

        quotient, remainder = self.divmod(divisor)
        if not remainder.is_zero():
            raise ValueError(f"{divisor} does not divide {self}")
        return quotient

    def truncate(self, terms: int) -> "Polynomial":
        return Polynomial(self.coefficients[:terms])

    def series_inverse(self, terms: int) -> "Polynomial":
        """Power series inverse modulo ``z**terms``; needs a nonzero constant term."""

        if not self.coefficient(0):
            raise ValueError("series inverse needs a nonzero constant term")
        if terms <= 0:
            return Polynomial()
        inverse = Polynomial.from_dense(dup_revert(self.dense(), terms, K))
        return inverse.truncate(terms)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        pieces = []
        for power, value in enumerate(self.coefficients):
            if not value:
                continue
            monomial = "" if power == 0 else ("z" if power == 1 else f"z^{power}")
            text = format_gaussian(value)
            if monomial:
                text = monomial if text == "1" else f"({text})*{monomial}"
            pieces.append(text)
        return " + ".join(pieces)


def polynomial(coefficients: Iterable[Coefficient]) -> Polynomial:
    """Build a polynomial from lowest-first coefficients."""

    return Polynomial(tuple(_coerce_scalar(c) for c in coefficients))


def poly_derivative(p: Polynomial) -> Polynomial:
    return p.derivative()


Operand = Union["RationalFunction", Polynomial, GaussianRational, int]


@dataclass(frozen=True, slots=True)
class RationalFunction:
    """Reduced quotient of polynomials with a monic denominator."""

    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self) -> None:
        numerator, denominator = self.numerator, self.denominator
        if denominator.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if numerator.is_zero():
            object.__setattr__(self, "denominator", Polynomial.constant(1))
            return
        if denominator.degree > 0:
            _, reduced_num, reduced_den = dup_inner_gcd(numerator.dense(), denominator.dense(), K)
            numerator = Polynomial.from_dense(reduced_num)
            denominator = Polynomial.from_dense(reduced_den)
        lead = denominator.leading_coefficient()
        if lead != ONE:
            inverse = ONE / lead
            numerator = numerator.scale(inverse)
            denominator = denominator.scale(inverse)
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "RationalFunction":
        return cls(p, Polynomial.constant(1))

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls(Polynomial(), Polynomial.constant(1))

    @classmethod
    def constant(cls, value: Coefficient) -> "RationalFunction":
        return cls(Polynomial.constant(value), Polynomial.constant(1))

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_polynomial(self) -> bool:
        return self.denominator.degree == 0

    def as_polynomial(self) -> Polynomial:
        if not self.is_polynomial():
            raise ValueError(f"{self} has poles in the chart")
        return self.numerator

    def is_regular_at(self, point: GaussianRational) -> bool:
        return bool(self.denominator(point))

    def __call__(self, point: Coefficient) -> GaussianRational:
        value = _coerce_scalar(point)
        den = self.denominator(value)
        if not den:
            raise ZeroDivisionError(f"pole at {format_gaussian(value)}")
        return self.numerator(value) / den

    def _lift(self, other: object) -> "RationalFunction | None":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction.from_polynomial(other)
        if isinstance(other, (int, GaussianRational)):
            return RationalFunction.constant(other)
        return None

    def __add__(self, other: object) -> "RationalFunction":
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        if self.denominator == rhs.denominator:
            return RationalFunction(self.numerator + rhs.numerator, self.denominator)
        return RationalFunction(
            self.numerator * rhs.denominator + rhs.numerator * self.denominator,
            self.denominator * rhs.denominator,
        )

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other: object) -> "RationalFunction":
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> "RationalFunction":
        lhs = self._lift(other)
        if lhs is None:
            return NotImplemented
        return lhs - self

    def __mul__(self, other: object) -> "RationalFunction":
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return RationalFunction(self.numerator * rhs.numerator, self.denominator * rhs.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "RationalFunction":
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        if rhs.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.numerator * rhs.denominator, self.denominator * rhs.numerator)

    def derivative(self) -> "RationalFunction":
        num, den = self.numerator, self.denominator
        return RationalFunction(num.derivative() * den - num * den.derivative(), den * den)

    def __str__(self) -> str:
        if self.is_polynomial():
            return str(self.numerator)
        return f"({self.numerator}) / ({self.denominator})"


@dataclass(frozen=True, slots=True)
class PrincipalPart:
    """Laurent data of a rational function at one point.

    ``coefficients[j - 1]`` multiplies ``(z - pole)**-j``; ``regular_value`` is
    the constant term of the expansion.
    """

    pole: GaussianRational
    coefficients: tuple[GaussianRational, ...]
    regular_value: GaussianRational

    @property
    def order(self) -> int:
        return len(self.coefficients)

    @property
    def residue(self) -> GaussianRational:
        return self.coefficients[0] if self.coefficients else ZERO

    def as_rational(self) -> RationalFunction:
        """The principal part as the rational function ``sum c_j (z - pole)**-j``."""

        if not self.coefficients:
            return RationalFunction.zero()
        order = self.order
        numerator = polynomial(reversed(self.coefficients)).shift(-self.pole)
        return RationalFunction(numerator, Polynomial.linear(self.pole) ** order)


def partial_fractions(f: RationalFunction, pole: GaussianRational) -> PrincipalPart:
    """Principal part of ``f`` at ``pole``.

    An empty coefficient tuple means ``f`` is regular there; callers that
    require an actual pole check :attr:`PrincipalPart.order`.
    """

    numerator = f.numerator.shift(pole)
    denominator = f.denominator.shift(pole)
    order = denominator.order_at_zero()
    unit = Polynomial(denominator.coefficients[order:])
    series = (numerator * unit.series_inverse(order + 1)).truncate(order + 1)
    principal = tuple(series.coefficient(order - j) for j in range(1, order + 1))
    return PrincipalPart(pole=pole, coefficients=principal, regular_value=series.coefficient(order))


def residue(f: RationalFunction, pole: GaussianRational) -> GaussianRational:
    return partial_fractions(f, pole).residue


__all__ = [
    "Polynomial",
    "PrincipalPart",
    "RationalFunction",
    "partial_fractions",
    "poly_derivative",
    "polynomial",
    "residue",
]
