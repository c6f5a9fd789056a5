"""Sparse bivariate polynomials with exact rational coefficients.

A polynomial is a map ``(exp_x, exp_y) -> mpq`` with no stored zeros.  The
global monomial order is graded lexicographic with ``x > y``; it decides the
leading term, the sign convention of :func:`normalize_primitive` and the
order in which terms are printed.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from functools import reduce
from math import gcd as igcd, lcm as ilcm
from typing import Dict, Iterable, Iterator, Optional, Tuple, Union

from gmpy2 import mpq, mpz

from .errors import DivisionByZeroPoly, NotDivisible, ZeroPolynomial

Rational = type(mpq())
Monomial = Tuple[int, int]
Scalar = Union[int, Fraction, "mpq"]

ZERO_DEGREE = -1  # degree sentinel of the zero polynomial
_Q0 = mpq(0)
_Q1 = mpq(1)


def Q(value) -> "mpq":
    """Coerce ints, Fractions, strings and mpq to an mpq."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return mpq(Fraction(value))
    return mpq(value)


def grlex_key(m: Monomial) -> Tuple[int, int]:
    return (m[0] + m[1], m[0])


class BivarPoly:
    """Immutable sparse polynomial in ``x`` and ``y`` over QQ."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[Dict[Monomial, Scalar]] = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = Q(c)
                if c:
                    if m[0] < 0 or m[1] < 0:
                        raise ValueError(f"negative exponent in monomial {m}")
                    clean[(int(m[0]), int(m[1]))] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Monomial, "mpq"]) -> "BivarPoly":
        # caller guarantees: mpq values, no zeros
        p = object.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c: Scalar) -> "BivarPoly":
        c = Q(c)
        return cls._raw({(0, 0): c} if c else {})

    @classmethod
    def monomial(cls, ex: int, ey: int, c: Scalar = 1) -> "BivarPoly":
        return cls({(ex, ey): c})

    @classmethod
    def x(cls) -> "BivarPoly":
        return cls._raw({(1, 0): _Q1})

    @classmethod
    def y(cls) -> "BivarPoly":
        return cls._raw({(0, 1): _Q1})

    @classmethod
    def zero(cls) -> "BivarPoly":
        return cls._raw({})

    @classmethod
    def one(cls) -> "BivarPoly":
        return cls._raw({(0, 0): _Q1})

    # -- basic queries ------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0, 0) in self.terms)

    def constant_value(self) -> "mpq":
        return self.terms.get((0, 0), _Q0)

    def degree(self) -> int:
        if not self.terms:
            return ZERO_DEGREE
        return max(i + j for i, j in self.terms)

    def degree_x(self) -> int:
        return max((i for i, _ in self.terms), default=ZERO_DEGREE)

    def degree_y(self) -> int:
        return max((j for _, j in self.terms), default=ZERO_DEGREE)

    def __len__(self) -> int:
        return len(self.terms)

    def monomials(self) -> list:
        return sorted(self.terms, key=grlex_key, reverse=True)

    def items(self) -> Iterator[Tuple[Monomial, "mpq"]]:
        for m in self.monomials():
            yield m, self.terms[m]

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise ZeroPolynomial("zero polynomial has no leading term")
        return max(self.terms, key=grlex_key)

    def leading_coeff(self) -> "mpq":
        return self.terms[self.leading_monomial()]

    def coeff(self, ex: int, ey: int) -> "mpq":
        return self.terms.get((ex, ey), _Q0)

    # -- equality / hashing -------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, BivarPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, Rational)):
            return self.terms == BivarPoly.const(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- ring operations ----------------------------------------------------
    @staticmethod
    def _coerce(other) -> Optional["BivarPoly"]:
        if isinstance(other, BivarPoly):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return BivarPoly.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if len(o.terms) > len(self.terms):
            big, small = o.terms, self.terms
        else:
            big, small = self.terms, o.terms
        out = dict(big)
        for m, c in small.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return BivarPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return BivarPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = -c
            else:
                v = v - c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return BivarPoly._raw(out)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "BivarPoly":
        c = Q(c)
        if not c:
            return BivarPoly._raw({})
        return BivarPoly._raw({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Rational)):
            return self.scale(other)
        if not isinstance(other, BivarPoly):
            return NotImplemented
        a, b = self.terms, other.terms
        if not a or not b:
            return BivarPoly._raw({})
        if len(a) < len(b):
            a, b = b, a
        out: Dict[Monomial, "mpq"] = {}
        get = out.get
        bl = list(b.items())
        for (i1, j1), c1 in a.items():
            for (i2, j2), c2 in bl:
                k = (i1 + i2, j1 + j2)
                out[k] = get(k, _Q0) + c1 * c2
        return BivarPoly._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            raise ValueError("negative exponent")
        result = BivarPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, ex: int, ey: int) -> "BivarPoly":
        """Multiply by the monomial ``x^ex * y^ey``."""
        return BivarPoly._raw({(i + ex, j + ey): c for (i, j), c in self.terms.items()})

    # -- calculus / evaluation ---------------------------------------------
    def diff(self, var: str) -> "BivarPoly":
        out = {}
        if var == "x":
            for (i, j), c in self.terms.items():
                if i:
                    out[(i - 1, j)] = c * i
        elif var == "y":
            for (i, j), c in self.terms.items():
                if j:
                    out[(i, j - 1)] = c * j
        else:
            raise ValueError(f"unknown variable {var!r}")
        return BivarPoly._raw(out)

    def __call__(self, x0: Scalar, y0: Scalar) -> "mpq":
        return evaluate(self, x0, y0)

    # -- content ------------------------------------------------------------
    def denominator_lcm(self) -> int:
        return reduce(ilcm, (int(c.denominator) for c in self.terms.values()), 1)

    def content(self) -> "mpq":
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return _Q0
        num = reduce(igcd, (int(c.numerator) for c in self.terms.values()), 0)
        den = self.denominator_lcm()
        return mpq(num, den)

    def primitive(self) -> "BivarPoly":
        return normalize_primitive(self)

    # -- printing -----------------------------------------------------------
    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"BivarPoly({format_poly(self)!r})"


def _mono_str(i: int, j: int) -> str:
    parts = []
    if i:
        parts.append("x" if i == 1 else f"x^{i}")
    if j:
        parts.append("y" if j == 1 else f"y^{j}")
    return "*".join(parts)


def format_poly(p: BivarPoly) -> str:
    """Canonical text in the syntax accepted by the expression parser."""
    if not p.terms:
        return "0"
    out = []
    for (i, j), c in p.items():
        neg = c < 0
        a = -c if neg else c
        mono = _mono_str(i, j)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("-" if neg else "+") + body)
    return "".join(out)


def evaluate(p: BivarPoly, x0: Scalar, y0: Scalar) -> "mpq":
    x0, y0 = Q(x0), Q(y0)
    total = _Q0
    px: Dict[int, "mpq"] = {}
    py: Dict[int, "mpq"] = {}
    for (i, j), c in p.terms.items():
        a = px.get(i)
        if a is None:
            a = px[i] = x0 ** i
        b = py.get(j)
        if b is None:
            b = py[j] = y0 ** j
        total += c * a * b
    return total


def normalize_primitive(p: BivarPoly) -> BivarPoly:
    """Scale ``p`` to coprime integer coefficients with positive leading coefficient."""
    if not p.terms:
        raise ZeroPolynomial("cannot normalize the zero polynomial")
    c = p.content()
    if p.leading_coeff() < 0:
        c = -c
    if c == 1:
        return p
    inv = 1 / c
    return BivarPoly._raw({m: v * inv for m, v in p.terms.items()})


def try_exact_div(a: BivarPoly, b: BivarPoly) -> Optional[BivarPoly]:
    """Quotient ``a / b`` if the division is exact, else None."""
    if not b.terms:
        raise DivisionByZeroPoly("division by the zero polynomial")
    if not a.terms:
        return a
    if len(b.terms) == 1:
        ((bi, bj), bc), = b.terms.items()
        inv = 1 / bc
        out = {}
        for (i, j), c in a.terms.items():
            if i < bi or j < bj:
                return None
            out[(i - bi, j - bj)] = c * inv
        return BivarPoly._raw(out)
    if a.degree_x() < b.degree_x() or a.degree_y() < b.degree_y():
        return None
    lb = b.leading_monomial()
    inv = 1 / b.terms[lb]
    rest = [(m, c) for m, c in b.terms.items() if m != lb]
    r = dict(a.terms)
    heap = [(-(i + j), -i, (i, j)) for (i, j) in r]
    heapq.heapify(heap)
    q = {}
    bi, bj = lb
    while r:
        _, _, m = heapq.heappop(heap)
        c = r.pop(m, None)
        if c is None:
            continue
        i, j = m
        if i < bi or j < bj:
            return None
        qi, qj = i - bi, j - bj
        t = c * inv
        q[(qi, qj)] = t
        for (ri, rj), rc in rest:
            k = (ri + qi, rj + qj)
            v = r.get(k)
            if v is None:
                r[k] = -t * rc
                heapq.heappush(heap, (-(k[0] + k[1]), -k[0], k))
            else:
                v = v - t * rc
                if v:
                    r[k] = v
                else:
                    del r[k]
    return BivarPoly._raw(q)


def exact_div(a: BivarPoly, b: BivarPoly) -> BivarPoly:
    q = try_exact_div(a, b)
    if q is None:
        raise NotDivisible(f"{b} does not divide {a}")
    return q


def divides(b: BivarPoly, a: BivarPoly) -> bool:
    return try_exact_div(a, b) is not None


def poly_from_terms(items: Iterable[Tuple[int, int, Scalar]]) -> BivarPoly:
    out: Dict[Monomial, "mpq"] = {}
    for i, j, c in items:
        out[(i, j)] = out.get((i, j), _Q0) + Q(c)
    return BivarPoly(out)


def integer_coefficients(p: BivarPoly) -> Tuple[int, Dict[Monomial, int]]:
    """Return (d, terms) with ``p = terms / d`` and integer ``terms``."""
    d = p.denominator_lcm()
    return d, {m: int(c * d) for m, c in p.terms.items()}


X = BivarPoly.x()
Y = BivarPoly.y()
ONE = BivarPoly.one()
ZERO = BivarPoly.zero()

__all__ = [
    "BivarPoly", "Monomial", "Q", "Rational", "ZERO_DEGREE", "X", "Y", "ONE", "ZERO",
    "grlex_key", "format_poly", "evaluate", "normalize_primitive", "try_exact_div",
    "exact_div", "divides", "poly_from_terms", "integer_coefficients", "mpz",
]
