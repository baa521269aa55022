"""Closed intervals with exact rational endpoints."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

ROUND_BITS = 96


def round_dyadic(v: Fraction, bits: int = ROUND_BITS, up: bool = False) -> Fraction:
    """Nearest dyadic below (or above) ``v`` with about ``bits`` significant bits."""
    if v == 0:
        return v
    shift = bits - (abs(v.numerator).bit_length() - v.denominator.bit_length())
    if shift <= 0:
        scaled = Fraction(v.numerator, v.denominator * (1 << -shift))
        whole = -((-scaled.numerator) // scaled.denominator) if up else scaled.numerator // scaled.denominator
        return Fraction(whole * (1 << -shift))
    num = v.numerator << shift
    whole = -((-num) // v.denominator) if up else num // v.denominator
    return Fraction(whole, 1 << shift)


class Interval:
    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = Fraction(lo)
        hi = lo if hi is None else Fraction(hi)
        if hi < lo:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def around(cls, mid, radius) -> "Interval":
        mid, radius = Fraction(mid), Fraction(radius)
        return cls(mid - radius, mid + radius)

    @staticmethod
    def _wrap(other) -> "Interval":
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return Interval(other)
        return NotImplemented

    def __add__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return o
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return o
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return o
        if o.lo == o.hi:
            a, b = self.lo * o.lo, self.hi * o.lo
            return Interval(min(a, b), max(a, b))
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(p), max(p))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k == 0:
            return Interval(1)
        if k % 2 == 1 or self.lo >= 0:
            a, b = self.lo ** k, self.hi ** k
            return Interval(min(a, b), max(a, b))
        if self.hi <= 0:
            return Interval(self.hi ** k, self.lo ** k)
        return Interval(0, max(self.lo ** k, self.hi ** k))

    def outward(self, bits: int = ROUND_BITS) -> "Interval":
        """A slightly wider interval whose endpoints are short dyadic rationals."""
        return Interval(round_dyadic(self.lo, bits), round_dyadic(self.hi, bits, up=True))

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, value) -> bool:
        value = Fraction(value)
        return self.lo <= value <= self.hi

    def contains_interval(self, other: "Interval", strict: bool = True) -> bool:
        if strict:
            return self.lo < other.lo and other.hi < self.hi
        return self.lo <= other.lo and other.hi <= self.hi

    def sign(self) -> int | None:
        """+1 or -1 if the interval excludes zero, 0 if it is {0}, else None."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == 0 == self.hi:
            return 0
        return None

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"


def interval_det(a) -> Interval:
    """Determinant of a small interval matrix by cofactor expansion."""
    n = len(a)
    if n == 0:
        return Interval(1)
    if n == 1:
        return Interval._wrap(a[0][0])
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = Interval(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * interval_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total
