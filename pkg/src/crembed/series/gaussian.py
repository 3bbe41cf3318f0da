"""Exact complex rationals ``p/q + (r/s) i``.

Both parts are :class:`fractions.Fraction`, so denominators are positive and
in lowest terms by construction.  The canonical text form is the literal
syntax accepted by the defining-function parser, e.g. ``1/2-3/4*i``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union["GaussianRational", int, Fraction]

_LITERAL = re.compile(
    r"^\s*(?:(?P<re>[+-]?\d+(?:/\d+)?)(?=$|\s*[+-]))?"
    r"\s*(?:(?P<im>[+-]?\s*(?:\d+(?:/\d+)?)?)\s*\*?\s*i)?\s*$"
)


def _fmt_fraction(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class GaussianRational:
    """Immutable element of Q(i)."""

    __slots__ = ("_re", "_im")

    def __init__(self, re: Number = 0, im: Number = 0):
        if isinstance(re, GaussianRational):
            base_re, base_im = re._re, re._im
        else:
            base_re, base_im = Fraction(re), Fraction(0)
        if isinstance(im, GaussianRational):
            # (x + yi) * i contributes -y to the real part
            base_re -= im._im
            base_im += im._re
        else:
            base_im += Fraction(im)
        self._re = base_re
        self._im = base_im

    @classmethod
    def from_ints(cls, re_num: int, im_num: int, den: int = 1) -> "GaussianRational":
        obj = cls.__new__(cls)
        obj._re = Fraction(re_num, den)
        obj._im = Fraction(im_num, den)
        return obj

    @classmethod
    def coerce(cls, value: Number) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Rational)):
            return cls(Fraction(value))
        if isinstance(value, complex):
            raise TypeError("floating-point complex values are not exact")
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse ``a/b``, ``c/d*i``, ``i`` or ``a/b+c/d*i``."""
        m = _LITERAL.match(text)
        if not m or (m.group("re") is None and m.group("im") is None):
            raise ValueError(f"not a Gaussian rational literal: {text!r}")
        re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
        im_part = Fraction(0)
        if m.group("im") is not None:
            raw = m.group("im").replace(" ", "")
            if raw in ("", "+"):
                im_part = Fraction(1)
            elif raw == "-":
                im_part = Fraction(-1)
            else:
                im_part = Fraction(raw)
        return cls(re_part, im_part)

    @property
    def re(self) -> Fraction:
        return self._re

    @property
    def im(self) -> Fraction:
        return self._im

    def as_ints(self) -> tuple[int, int, int]:
        """Return ``(p, q, d)`` with value ``(p + q i)/d`` and ``d > 0``."""
        d = self._re.denominator * self._im.denominator // math.gcd(
            self._re.denominator, self._im.denominator
        )
        return (
            self._re.numerator * (d // self._re.denominator),
            self._im.numerator * (d // self._im.denominator),
            d,
        )

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self._re, -self._im)

    def norm(self) -> Fraction:
        return self._re * self._re + self._im * self._im

    def is_zero(self) -> bool:
        return not self._re and not self._im

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: Number) -> "GaussianRational":
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self._re + o._re, self._im + o._im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self._re, -self._im)

    def __pos__(self) -> "GaussianRational":
        return self

    def __sub__(self, other: Number) -> "GaussianRational":
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self._re - o._re, self._im - o._im)

    def __rsub__(self, other: Number) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __mul__(self, other: Number) -> "GaussianRational":
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(
            self._re * o._re - self._im * o._im, self._re * o._im + self._im * o._re
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self._re / n, -self._im / n)

    def __truediv__(self, other: Number) -> "GaussianRational":
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Number) -> "GaussianRational":
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "GaussianRational":
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GaussianRational):
            return self._re == other._re and self._im == other._im
        if isinstance(other, (int, Rational)):
            return not self._im and self._re == other
        return NotImplemented

    def __hash__(self) -> int:
        if not self._im:
            return hash(self._re)
        return hash((self._re, self._im))

    def __str__(self) -> str:
        re_s = _fmt_fraction(self._re)
        if not self._im:
            return re_s
        im = self._im
        if im == 1:
            im_s = "i"
        elif im == -1:
            im_s = "-i"
        else:
            im_s = f"{_fmt_fraction(im)}*i"
        if not self._re:
            return im_s
        if im_s.startswith("-"):
            return f"{re_s}{im_s}"
        return f"{re_s}+{im_s}"

    def __repr__(self) -> str:
        return f"GaussianRational({str(self)!r})"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)
