"""Exact rational and Gaussian-rational scalars.

Rationals are ``gmpy2.mpq`` when gmpy2 is importable and
``fractions.Fraction`` otherwise; both print as ``p/q`` and hash like
Python's own rationals, so callers never need to know which one is active.
"""
from __future__ import annotations

import math
from fractions import Fraction

try:
    from gmpy2 import mpq as Q
    RATIONAL_BACKEND = "gmpy2"
except ImportError:  # pragma: no cover - exercised only without gmpy2
    Q = Fraction
    RATIONAL_BACKEND = "fraction"

ZERO = Q(0)
ONE = Q(1)
HALF = Q(1, 2)


def to_rational(value) -> Q:
    """Coerce ints, Fractions, mpq values and ``"p/q"`` strings to ``Q``."""
    if isinstance(value, str):
        value = value.strip()
        if not value or any(ch in value for ch in ".eE"):
            raise ValueError(f"not a decimal-free fraction string: {value!r}")
        f = Fraction(value)
        return Q(f.numerator, f.denominator)
    if isinstance(value, float):
        raise TypeError("floating point values are not exact; pass a Fraction or 'p/q'")
    if isinstance(value, Fraction):
        return Q(value.numerator, value.denominator)
    return Q(value)


def rational_str(value) -> str:
    """Decimal-free fraction string: ``"-3/4"``, ``"2"``, ``"0"``."""
    value = to_rational(value) if not isinstance(value, Q) else value
    num, den = int(value.numerator), int(value.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def rational_sqrt(value) -> Q | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    value = to_rational(value)
    if value < 0:
        return None
    num, den = int(value.numerator), int(value.denominator)
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Q(rn, rd)
    return None


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", to_rational(re) if not isinstance(re, Q) else re)
        object.__setattr__(self, "im", to_rational(im) if not isinstance(im, Q) else im)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, value) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise TypeError("floating complex values are not exact")
        if isinstance(value, str):
            return cls.parse(value)
        return cls(value, 0)

    @classmethod
    def parse(cls, text: str) -> GaussianRational:
        """Parse ``"a"``, ``"b*i"``, ``"a+b*i"`` style strings with fraction parts."""
        t = text.replace(" ", "")
        if not t:
            raise ValueError("empty Gaussian rational")
        if not t.endswith("i"):
            return cls(t, 0)
        body = t[:-1].rstrip("*")
        # split at the last sign that is not leading
        cut = max(body.rfind("+", 1), body.rfind("-", 1))
        if cut <= 0:
            re_part, im_part = "0", body
        else:
            re_part, im_part = body[:cut], body[cut:]
        if im_part in ("", "+"):
            im_part = "1"
        elif im_part == "-":
            im_part = "-1"
        return cls(re_part, im_part)

    @property
    def pair(self) -> tuple:
        return (self.re, self.im)

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    conj = conjugate

    def norm(self) -> Q:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def inverse(self) -> GaussianRational:
        d = self.norm()
        if not d:
            raise ZeroDivisionError("GaussianRational(0) has no inverse")
        return GaussianRational(self.re / d, -self.im / d)

    def sqrt(self) -> GaussianRational | None:
        """A square root inside Q(i) when one exists (principal branch: re > 0, or re = 0 and im >= 0)."""
        a, b = self.re, self.im
        if not b:
            r = rational_sqrt(a) if a >= 0 else rational_sqrt(-a)
            if r is None:
                return None
            return GaussianRational(r, 0) if a >= 0 else GaussianRational(0, r)
        modulus = rational_sqrt(a * a + b * b)
        if modulus is None:
            return None
        x = rational_sqrt((a + modulus) / 2)
        if x is None or not x:
            return None
        return GaussianRational(x, b / (2 * x))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) or isinstance(other, Q):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im)) if self.im else hash(self.re)

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        result = GaussianRational(1)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __repr__(self) -> str:
        return f"GaussianRational({self})"

    def __str__(self) -> str:
        re_s, im_s = rational_str(self.re), rational_str(self.im)
        if not self.im:
            return re_s
        if not self.re:
            return f"{im_s}*i"
        sign = "-" if self.im < 0 else "+"
        return f"{re_s}{sign}{rational_str(abs(self.im))}*i"


def _coerce(value) -> GaussianRational | None:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction, str)) or isinstance(value, Q):
        return GaussianRational(value)
    return None


I = GaussianRational(0, 1)
