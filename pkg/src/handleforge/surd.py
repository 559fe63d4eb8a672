"""Exact numbers a + b*sqrt(2) with rational a, b."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering

SQRT2_FLOAT = math.sqrt(2)


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction, int or string")
    return Fraction(x)


@total_ordering
class Surd:
    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = _q(a)
        self.b = _q(b)

    @classmethod
    def coerce(cls, x) -> "Surd":
        return x if isinstance(x, Surd) else cls(x)

    def __add__(self, other):
        o = Surd.coerce(other)
        return Surd(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-Surd.coerce(other))

    def __rsub__(self, other):
        return Surd.coerce(other) - self

    def __mul__(self, other):
        o = Surd.coerce(other)
        return Surd(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self) -> "Surd":
        return Surd(self.a, -self.b)

    def norm(self) -> Fraction:
        """a^2 - 2 b^2, the product with the conjugate."""
        return self.a * self.a - 2 * self.b * self.b

    def __truediv__(self, other):
        o = Surd.coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero surd")
        num = self * o.conjugate()
        return Surd(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        return Surd.coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Surd(other)
        if not isinstance(other, Surd):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def sign(self) -> int:
        # sign of a + b sqrt2 without floating point
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with 2 b^2
        big_a = a * a > 2 * b * b
        return (1 if a > 0 else -1) if big_a else (1 if b > 0 else -1)

    def __lt__(self, other):
        return (self - Surd.coerce(other)).sign() < 0

    def __float__(self):
        return float(self.a) + float(self.b) * SQRT2_FLOAT

    def __repr__(self):
        return f"Surd({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        rt = "sqrt2" if self.b == 1 else f"{self.b}*sqrt2"
        if self.a == 0:
            return rt
        return f"{self.a}+{rt}" if self.b > 0 else f"{self.a}{rt}"

    def as_json(self) -> list[str]:
        return [str(self.a), str(self.b)]

    @classmethod
    def from_json(cls, data) -> "Surd":
        a, b = data
        return cls(Fraction(a), Fraction(b))


SQRT2 = Surd(0, 1)


def exact_sqrt(x: Fraction | int) -> Surd | None:
    """sqrt(x) as a surd when it is rational or a rational multiple of sqrt 2."""
    x = Fraction(x)
    if x < 0:
        return None
    for scale, unit in ((1, Surd(1)), (2, SQRT2)):
        y = x / scale
        n, d = math.isqrt(y.numerator), math.isqrt(y.denominator)
        if n * n == y.numerator and d * d == y.denominator:
            return Fraction(n, d) * unit
    return None
