"""Gaussian rational scalars and complex literal parsing."""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational

RationalLike = Union[int, Fraction, str]
Scalar = Union[GaussianRational, complex]

ZERO = QQ_I.zero
ONE = QQ_I.one
I_UNIT = QQ_I(0, 1)


def _to_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(value.strip())


def gaussian(re: RationalLike = 0, im: RationalLike = 0) -> GaussianRational:
    """Return the exact scalar ``re + im·i``."""

    real = _to_fraction(re)
    imag = _to_fraction(im)
    return QQ_I(
        QQ(real.numerator, real.denominator),
        QQ(imag.numerator, imag.denominator),
    )


def from_int(value: int) -> GaussianRational:
    return QQ_I(value)


def ratio(numerator: int, denominator: int) -> GaussianRational:
    """Exact rational ``numerator / denominator`` as a Gaussian rational."""

    if denominator == 0:
        raise ZeroDivisionError("ratio with zero denominator")
    return QQ_I(QQ(numerator, denominator))


def parts(value: GaussianRational) -> tuple[Fraction, Fraction]:
    """Real and imaginary parts as :class:`fractions.Fraction`."""

    return (
        Fraction(int(value.x.numerator), int(value.x.denominator)),
        Fraction(int(value.y.numerator), int(value.y.denominator)),
    )


def to_complex(value: Scalar) -> complex:
    if isinstance(value, GaussianRational):
        real, imag = parts(value)
        return complex(float(real), float(imag))
    return complex(value)


def is_zero(value: Scalar) -> bool:
    return not value


def _format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_gaussian(value: GaussianRational) -> str:
    """Render ``value`` in the ``a+bi`` grammar accepted by :func:`parse_gaussian`."""

    real, imag = parts(value)
    if imag == 0:
        return _format_fraction(real)
    if abs(imag) == 1:
        imag_text = "i" if imag > 0 else "-i"
    else:
        imag_text = f"{_format_fraction(imag)}i"
    if real == 0:
        return imag_text
    sign = "" if imag_text.startswith("-") else "+"
    return f"{_format_fraction(real)}{sign}{imag_text}"


def format_scalar(value: Scalar) -> str:
    if isinstance(value, GaussianRational):
        return format_gaussian(value)
    value = complex(value)
    return f"{value.real!r}{'+' if value.imag >= 0 else '-'}{abs(value.imag)!r}i"


def _split_literal(text: str) -> tuple[str, str]:
    body = text.replace(" ", "")
    if not body:
        raise ValueError("empty complex literal")
    if not body.endswith(("i", "j")):
        return body, "0"
    body = body[:-1]
    split = -1
    for index in range(len(body) - 1, 0, -1):
        if body[index] in "+-" and body[index - 1] not in "eE":
            split = index
            break
    if split < 0:
        real, imag = "0", body
    else:
        real, imag = body[:split], body[split:]
    if imag in ("", "+"):
        imag = "1"
    elif imag == "-":
        imag = "-1"
    return real, imag


def parse_parts(text: str) -> tuple[Fraction, Fraction, bool]:
    """Split ``a+bi`` into exact parts; the flag is set when a part used decimal notation."""

    real_text, imag_text = _split_literal(text)
    try:
        real = Fraction(real_text)
        imag = Fraction(imag_text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed complex literal {text!r}") from exc
    decimal = any(marker in part for part in (real_text, imag_text) for marker in ".eE")
    return real, imag, decimal


def parse_gaussian(text: str) -> GaussianRational:
    """Parse an exact literal; decimal notation is rejected."""

    real, imag, decimal = parse_parts(text)
    if decimal:
        raise ValueError(f"{text!r} is not an exact rational literal (use p/q instead of decimals)")
    return gaussian(real, imag)


def parse_complex(text: str) -> complex:
    real, imag, _ = parse_parts(text)
    return complex(float(real), float(imag))


__all__ = [
    "GaussianRational",
    "I_UNIT",
    "ONE",
    "Scalar",
    "ZERO",
    "format_gaussian",
    "format_scalar",
    "from_int",
    "gaussian",
    "is_zero",
    "parse_complex",
    "parse_gaussian",
    "parse_parts",
    "parts",
    "ratio",
    "to_complex",
]
