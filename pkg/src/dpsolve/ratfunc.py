"""Rational functions num/den in canonical form."""

from __future__ import annotations

from fractions import Fraction

from .errors import DivisionByZeroPoly
from .poly import BivarPoly, Q, Rational, evaluate, exact_div
from .prs import gcd


class RatFunc:
    """Quotient of coprime polynomials; the denominator is primitive with positive leading coefficient."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _canonical: bool = False):
        num = _as_poly(num)
        den = BivarPoly.one() if den is None else _as_poly(den)
        if den.is_zero():
            raise DivisionByZeroPoly("zero denominator")
        if not _canonical:
            num, den = _canon_pair(num, den)
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: BivarPoly) -> "RatFunc":
        return cls(p, BivarPoly.one(), _canonical=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> BivarPoly:
        if not self.is_polynomial():
            raise ValueError("not a polynomial")
        return self.num.scale(1 / self.den.constant_value())

    def __eq__(self, other):
        if isinstance(other, (BivarPoly, int, Fraction, Rational)):
            other = RatFunc(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DivisionByZeroPoly("division by zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if n >= 0:
            return RatFunc(self.num ** n, self.den ** n, _canonical=True) if n else RatFunc(1)
        if self.is_zero():
            raise DivisionByZeroPoly("zero to a negative power")
        return RatFunc(self.den ** (-n), self.num ** (-n))

    def diff(self, var: str) -> "RatFunc":
        return RatFunc(self.num.diff(var) * self.den - self.num * self.den.diff(var), self.den * self.den)

    def __call__(self, x0, y0):
        d = evaluate(self.den, x0, y0)
        if not d:
            raise DivisionByZeroPoly("denominator vanishes at evaluation point")
        return evaluate(self.num, x0, y0) / d

    def __str__(self):
        if self.den == BivarPoly.one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatFunc({str(self)!r})"


def _as_poly(v) -> BivarPoly:
    if isinstance(v, BivarPoly):
        return v
    return BivarPoly.const(Q(v))


def _as_rf(v):
    if isinstance(v, RatFunc):
        return v
    if isinstance(v, (BivarPoly, int, Fraction, Rational)):
        return RatFunc.from_poly(_as_poly(v))
    return None


def _canon_pair(num: BivarPoly, den: BivarPoly):
    if num.is_zero():
        return num, BivarPoly.one()
    if not den.is_constant():
        g = gcd(num, den)
        if not g.is_constant():
            num = exact_div(num, g)
            den = exact_div(den, g)
    c = den.content()
    if den.leading_coeff() < 0:
        c = -c
    if c != 1:
        inv = 1 / c
        num = num.scale(inv)
        den = den.scale(inv)
    return num, den


def canon(r: RatFunc) -> RatFunc:
    """Canonical form; RatFunc instances are always canonical so this is idempotent."""
    return RatFunc(r.num, r.den)
