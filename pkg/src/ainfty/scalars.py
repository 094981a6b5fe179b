"""Exact scalars: rationals (``fractions.Fraction``) and Gaussian rationals.

Rationals are the default field.  A :class:`GaussianRational` only appears when
an input explicitly carries an imaginary part; arithmetic between the two types
is closed and results with a vanishing imaginary part collapse back to
``Fraction`` so that zero tests and hashing stay uniform.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

__all__ = [
    "GaussianRational",
    "Scalar",
    "as_scalar",
    "canonical",
    "format_scalar",
    "parse_scalar",
    "ONE",
    "ZERO",
]

ZERO = Fraction(0)
ONE = Fraction(1)


class GaussianRational:
    """An element ``re + im*i`` of Q(i) with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Fraction | int, im: Fraction | int = 0) -> None:
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def _parts(x) -> tuple[Fraction, Fraction]:
        if isinstance(x, GaussianRational):
            return x.re, x.im
        if isinstance(x, (int, Fraction)):
            return Fraction(x), ZERO
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        p = self._parts(other)
        if p is NotImplemented:
            return NotImplemented
        return canonical(GaussianRational(self.re + p[0], self.im + p[1]))

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        p = self._parts(other)
        if p is NotImplemented:
            return NotImplemented
        return canonical(GaussianRational(self.re - p[0], self.im - p[1]))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        p = self._parts(other)
        if p is NotImplemented:
            return NotImplemented
        a, b = self.re, self.im
        c, d = p
        return canonical(GaussianRational(a * c - b * d, a * d + b * c))

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __truediv__(self, other):
        p = self._parts(other)
        if p is NotImplemented:
            return NotImplemented
        c, d = p
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        a, b = self.re, self.im
        return canonical(GaussianRational((a * c + b * d) / den, (b * c - a * d) / den))

    def __rtruediv__(self, other):
        return GaussianRational(*self._parts(other)) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return ONE / (self ** (-n))
        out: Scalar = ONE
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        p = self._parts(other)
        if p is NotImplemented:
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __repr__(self) -> str:
        return f"GaussianRational({format_scalar(self.re)}, {format_scalar(self.im)})"

    def __str__(self) -> str:
        return format_scalar(self)


Scalar = Union[Fraction, GaussianRational]


def canonical(x) -> Scalar:
    """Return ``x`` in canonical form (a ``Fraction`` whenever it is real)."""
    if isinstance(x, GaussianRational):
        return x.re if x.im == 0 else x
    return Fraction(x)


def as_scalar(x) -> Scalar:
    """Coerce ints, Fractions, strings and Gaussian rationals to a canonical scalar."""
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, float):
        raise TypeError("floating-point scalars are not supported")
    return canonical(x)


_RAT = r"[+-]?\d+(?:/\d+)?"
_GAUSS = re.compile(rf"^\s*(?P<re>{_RAT})?\s*(?:(?P<im>[+-]\s*(?:\d+(?:/\d+)?)?|{_RAT})\s*i)?\s*$")


def parse_scalar(text: str) -> Scalar:
    """Parse ``"p/q"``, ``"p"`` or ``"p/q+r/s i"`` (also ``"r/s i"``, ``"-i"``)."""
    s = text.strip()
    if not s:
        raise ValueError("empty scalar")
    if "i" not in s:
        if not re.fullmatch(_RAT, s):
            raise ValueError(f"malformed rational {text!r}")
        try:
            return Fraction(s)
        except ZeroDivisionError as exc:
            raise ValueError(f"malformed rational {text!r}") from exc
    if s in ("i", "+i"):
        return GaussianRational(0, 1)
    m = _GAUSS.match(s)
    if m is None or m.group("im") is None:
        raise ValueError(f"malformed Gaussian rational {text!r}")
    re_part = Fraction(m.group("re")) if m.group("re") else ZERO
    im_txt = m.group("im").replace(" ", "")
    if im_txt in ("+", ""):
        im_part = ONE
    elif im_txt == "-":
        im_part = -ONE
    else:
        im_part = Fraction(im_txt)
    return canonical(GaussianRational(re_part, im_part))


def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x: Scalar) -> str:
    """Canonical text form, inverse of :func:`parse_scalar`."""
    x = canonical(x)
    if isinstance(x, Fraction):
        return _fmt_rat(x)
    im = _fmt_rat(abs(x.im))
    sign = "-" if x.im < 0 else "+"
    if x.re == 0:
        return f"{'-' if x.im < 0 else ''}{im} i"
    return f"{_fmt_rat(x.re)}{sign}{im} i"
