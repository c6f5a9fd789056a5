"""Independent oracle for small polynomial systems: resultant elimination plus brute force.

For each unknown, the other unknowns are eliminated by iterated resultants,
which yields a univariate polynomial vanishing at that coordinate of every
solution.  The rational roots of these eliminants give finitely many candidate
points; each candidate is checked exactly against the original equations.
"""

from __future__ import annotations

import itertools
import random
from typing import List, Optional, Sequence, Tuple

import sympy

from dpsolve.ansatz import ParamExpr, PolySystem, fresh_symbol


def to_sympy(e: ParamExpr, gens: dict):
    out = sympy.Integer(0)
    for mono, c in e.terms.items():
        term = sympy.Rational(int(c.numerator), int(c.denominator))
        for sid in mono:
            term *= gens[sid]
        out += term
    return sympy.expand(out)


def _eliminant(polys: List, keep, others: Sequence) -> Optional[sympy.Expr]:
    """A nonzero univariate polynomial in ``keep`` vanishing on the common zeros, or None."""
    cur = [p for p in polys if p != 0]
    for v in others:
        with_v = [p for p in cur if sympy.degree(p, v) > 0]
        without = [p for p in cur if sympy.degree(p, v) <= 0]
        nxt = list(without)
        for a, b in itertools.combinations(with_v, 2):
            r = sympy.expand(sympy.resultant(a, b, v))
            if r != 0:
                nxt.append(r)
        cur = [p for p in nxt if p != 0]
        if not cur:
            return None
    g = None
    for p in cur:
        g = p if g is None else sympy.gcd(g, p)
    if g is None or g == 0:
        return None
    return g


def rational_points(system: PolySystem, order: Sequence[int]) -> Optional[set]:
    """All rational solutions, or None if some eliminant vanishes identically."""
    gens = {sid: sympy.Symbol(f"u{sid}") for sid in order}
    polys = [to_sympy(e, gens) for e in system.equations]
    cand = []
    for sid in order:
        v = gens[sid]
        others = [gens[t] for t in order if t != sid]
        el = _eliminant(polys, v, others)
        if el is None:
            return None
        if el.free_symbols - {v}:
            return None
        if not el.free_symbols:
            # a nonzero constant: no solutions
            return set()
        roots = [r for r in sympy.Poly(el, v).ground_roots() if r.is_rational]
        cand.append(roots)
    out = set()
    for pt in itertools.product(*cand):
        sub = {gens[sid]: val for sid, val in zip(order, pt)}
        if all(sympy.expand(p.subs(sub)) == 0 for p in polys):
            out.add(tuple(sympy.Rational(c) for c in pt))
    return out


def random_system(seed: int) -> Tuple[PolySystem, list]:
    """Up to 3 unknowns, degree <= 2, with planted rational structure.

    Half the instances are products of random linear forms (many rational
    points, exercises case splitting); the rest are dense quadrics through a
    planted rational point.
    """
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    syms = [fresh_symbol(f"u{i}") for i in range(n)]
    X = [ParamExpr.sym(s) for s in syms]

    def linear():
        e = ParamExpr.const(rng.randint(-3, 3))
        for x in X:
            e = e + x * rng.randint(-3, 3)
        return e

    eqs = []
    if rng.random() < 0.5:
        for _ in range(n):
            eqs.append(linear() * linear() if rng.random() < 0.8 else linear())
    else:
        pt = [rng.randint(-2, 2) for _ in range(n)]
        for _ in range(n + rng.randint(0, 1)):
            e = ParamExpr.const(0)
            for i in range(n):
                for j in range(i, n):
                    if rng.random() < 0.6:
                        e = e + X[i] * X[j] * rng.randint(-3, 3)
                e = e + X[i] * rng.randint(-3, 3)
            val = e.evaluate({s.id: v for s, v in zip(syms, pt)})
            eqs.append(e - val)
    return PolySystem(eqs, syms), syms
