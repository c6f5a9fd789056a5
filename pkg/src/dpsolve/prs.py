"""Bivariate gcd by content reduction and a subresultant remainder sequence.

Polynomials are moved to Z[y][x]: a list indexed by the x-degree whose
entries are dense integer coefficient lists in y (low degree first).  The
univariate gcd in Z[y] uses the same subresultant recurrence over Z.
"""

from __future__ import annotations

from functools import reduce
from math import gcd as igcd
from typing import List

from .poly import BivarPoly, integer_coefficients, normalize_primitive

UPoly = List[int]      # dense, low -> high, no trailing zeros; [] is zero
XPoly = List[UPoly]    # dense in x, entries in Z[y]; no trailing zero entries


# -- Z[y] ----------------------------------------------------------------------

def _trim(a: list) -> list:
    while a and not a[-1]:
        a.pop()
    return a


def u_add(a: UPoly, b: UPoly) -> UPoly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def u_sub(a: UPoly, b: UPoly) -> UPoly:
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] -= c
    return _trim(out)


def u_mul(a: UPoly, b: UPoly) -> UPoly:
    if not a or not b:
        return []
    if len(a) == 1:
        c = a[0]
        return [c * v for v in b]
    if len(b) == 1:
        c = b[0]
        return [c * v for v in a]
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return _trim(out)


def u_scale(a: UPoly, c: int) -> UPoly:
    if not c:
        return []
    return [c * v for v in a]


def u_pow(a: UPoly, n: int) -> UPoly:
    out: UPoly = [1]
    while n:
        if n & 1:
            out = u_mul(out, a)
        n >>= 1
        if n:
            a = u_mul(a, a)
    return out


def u_divexact(a: UPoly, b: UPoly) -> UPoly:
    """Quotient of an exact division in Z[y]."""
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    if not a:
        return []
    if len(b) == 1:
        c = b[0]
        out = []
        for v in a:
            qv, rv = divmod(v, c)
            if rv:
                raise ArithmeticError("inexact division in Z[y]")
            out.append(qv)
        return out
    r = list(a)
    db = len(b) - 1
    lc = b[-1]
    q = [0] * (len(a) - db) if len(a) > db else []
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db]
        if not c:
            continue
        t, rem = divmod(c, lc)
        if rem:
            raise ArithmeticError("inexact division in Z[y]")
        q[k] = t
        for i, bv in enumerate(b):
            r[k + i] -= t * bv
    if any(r):
        raise ArithmeticError("inexact division in Z[y]")
    return _trim(q)


def u_content(a: UPoly) -> int:
    c = reduce(igcd, a, 0)
    if a and a[-1] < 0:
        c = -c
    return c


def u_primitive(a: UPoly) -> UPoly:
    if not a:
        return []
    c = u_content(a)
    return [v // c for v in a]


def u_prem(a: UPoly, b: UPoly) -> UPoly:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b."""
    db = len(b) - 1
    lc = b[-1]
    r = list(a)
    e = len(a) - 1 - db + 1
    while r and len(r) - 1 >= db:
        d = len(r) - 1 - db
        c = r[-1]
        r = [lc * v for v in r]
        for i, bv in enumerate(b):
            r[i + d] -= c * bv
        _trim(r)
        e -= 1
    if e > 0 and r:
        f = lc ** e
        r = [f * v for v in r]
    return r


def u_gcd(a: UPoly, b: UPoly) -> UPoly:
    """Primitive gcd in Z[y] with positive leading coefficient."""
    if not a:
        return u_primitive(b)
    if not b:
        return u_primitive(a)
    if len(a) < len(b):
        a, b = b, a
    ca, cb = u_content(a), u_content(b)
    d = igcd(ca, cb)
    a, b = u_primitive(a), u_primitive(b)
    g = h = 1
    while True:
        delta = len(a) - len(b)
        r = u_prem(a, b)
        if not r:
            break
        if len(r) == 1:
            return [abs(d)]
        a, b = b, r
        den = g * h ** delta
        b = [v // den for v in b]
        g = a[-1]
        h = g ** delta // h ** (delta - 1) if delta else h
    out = u_primitive(b)
    return [abs(d) * v for v in out]


# -- Z[y][x] -------------------------------------------------------------------

def _x_trim(a: XPoly) -> XPoly:
    while a and not a[-1]:
        a.pop()
    return a


def x_content(a: XPoly) -> UPoly:
    g: UPoly = []
    for c in a:
        if c:
            g = u_gcd(g, c)
            if len(g) == 1:
                return [1]
    return g


def x_prem(a: XPoly, b: XPoly) -> XPoly:
    db = len(b) - 1
    lc = b[-1]
    r = [list(c) for c in a]
    e = len(a) - 1 - db + 1
    while r and len(r) - 1 >= db:
        d = len(r) - 1 - db
        c = r[-1]
        r = [u_mul(lc, v) for v in r]
        for i, bv in enumerate(b):
            if bv:
                r[i + d] = u_sub(r[i + d], u_mul(c, bv))
        _x_trim(r)
        e -= 1
    if e > 0 and r:
        f = u_pow(lc, e)
        r = [u_mul(f, v) for v in r]
    return r


def x_divexact_scalar(a: XPoly, c: UPoly) -> XPoly:
    return [u_divexact(v, c) if v else [] for v in a]


def x_subresultant_gcd(a: XPoly, b: XPoly) -> XPoly:
    """gcd in Z[y][x] of two nonzero polynomials, up to a unit."""
    if len(a) < len(b):
        a, b = b, a
    ca, cb = x_content(a), x_content(b)
    d = u_gcd(ca, cb)
    a = x_divexact_scalar(a, ca)
    b = x_divexact_scalar(b, cb)
    g: UPoly = [1]
    h: UPoly = [1]
    while True:
        delta = len(a) - len(b)
        r = x_prem(a, b)
        if not r:
            break
        if len(r) == 1:
            return [d]
        a, b = b, r
        b = x_divexact_scalar(b, u_mul(g, u_pow(h, delta)))
        g = a[-1]
        if delta:
            h = u_divexact(u_pow(g, delta), u_pow(h, delta - 1))
    pb = x_divexact_scalar(b, x_content(b))
    return [u_mul(d, v) for v in pb]


def _to_x(terms, main: str) -> XPoly:
    dx = max((m[0] if main == "x" else m[1]) for m in terms)
    out: XPoly = [[] for _ in range(dx + 1)]
    for (i, j), c in terms.items():
        k, l = (i, j) if main == "x" else (j, i)
        row = out[k]
        if len(row) <= l:
            row.extend([0] * (l + 1 - len(row)))
        row[l] = c
    return out


def _from_x(a: XPoly, main: str) -> BivarPoly:
    terms = {}
    for k, row in enumerate(a):
        for l, c in enumerate(row):
            if c:
                terms[(k, l) if main == "x" else (l, k)] = c
    return BivarPoly(terms)


def _monomial_part(p: BivarPoly):
    return (min(i for i, _ in p.terms), min(j for _, j in p.terms))


def gcd(a: BivarPoly, b: BivarPoly) -> BivarPoly:
    """Primitive gcd with positive leading coefficient (graded lex, x > y).

    ``gcd(0, 0)`` is not defined; ``gcd(p, 0)`` is the normalized ``p``.
    """
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if a.is_zero():
        return normalize_primitive(b)
    if b.is_zero():
        return normalize_primitive(a)
    ax, ay = _monomial_part(a)
    bx, by = _monomial_part(b)
    mx, my = min(ax, bx), min(ay, by)
    a = a.shift(-ax, -ay)
    b = b.shift(-bx, -by)
    mono = BivarPoly({(mx, my): 1})
    if a.is_constant() or b.is_constant():
        return mono
    if a == b:
        return normalize_primitive(a * mono)
    _, ai = integer_coefficients(a)
    _, bi = integer_coefficients(b)
    # take the variable with the smaller degree as main variable
    main = "x" if max(a.degree_x(), b.degree_x()) <= max(a.degree_y(), b.degree_y()) else "y"
    ax_, bx_ = _to_x(ai, main), _to_x(bi, main)
    if len(ax_) == 1 or len(bx_) == 1:
        # one side has no main variable: gcd is a gcd of contents
        ca = x_content(ax_) if len(ax_) > 1 else u_primitive(ax_[0])
        cb = x_content(bx_) if len(bx_) > 1 else u_primitive(bx_[0])
        g = _from_x([u_gcd(ca, cb)], main)
    else:
        g = _from_x(x_subresultant_gcd(ax_, bx_), main)
    return normalize_primitive(g * mono)


def lcm(a: BivarPoly, b: BivarPoly) -> BivarPoly:
    from .poly import exact_div
    if a.is_zero() or b.is_zero():
        return BivarPoly.zero()
    return normalize_primitive(exact_div(a * b, gcd(a, b)))
