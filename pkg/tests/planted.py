"""Seeded generators for planted Darboux instances and small polynomial systems."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Optional

import sympy

from dpsolve.darboux import VectorField
from dpsolve.poly import BivarPoly, exact_div, normalize_primitive
from dpsolve.prs import gcd
from dpsolve.ratfunc import RatFunc


def random_poly(rng: random.Random, degree: int, terms: int, coeff: int = 3,
                require_degree: bool = True) -> BivarPoly:
    monos = [(i, d - i) for d in range(degree + 1) for i in range(d + 1)]
    items = {}
    if require_degree:
        top = [m for m in monos if sum(m) == degree]
        items[rng.choice(top)] = rng.choice([c for c in range(-coeff, coeff + 1) if c])
    while len(items) < min(terms, len(monos)):
        items[rng.choice(monos)] = rng.choice([c for c in range(-coeff, coeff + 1) if c])
    return BivarPoly({m: c for m, c in items.items()})


def _irreducible_ok(p: BivarPoly) -> bool:
    """Non-constant and irreducible over Q (checked with sympy)."""
    if p.is_constant():
        return False
    x, y = sympy.symbols("x y")
    expr = sympy.sympify(str(p).replace("^", "**"))
    _, factors = sympy.factor_list(expr, x, y)
    return len(factors) == 1 and factors[0][1] == 1


@dataclass
class PlantedField:
    D0: VectorField
    dps: List[BivarPoly]
    exponents: List[int]
    exp_part: Optional[RatFunc] = None
    seed: int = 0

    @property
    def planted_set(self) -> frozenset:
        return frozenset(normalize_primitive(p) for p in self.dps)


def planted_field(seed: int, max_factors: int = 3, max_deg: int = 4, max_total: int = 5,
                  with_exp: Optional[bool] = None) -> PlantedField:
    """A field with integrating factor ``exp(A/B) * prod(p_i^n_i)`` and no rational first integral.

    Without an exponential part the field is ``M dx - N dy = W dH`` for the
    Darboux integral ``H = U/V + sum(c_i log p_i)``: pole factors (the factors
    of V) get exponent -2, logarithmic ones -1, and ``R = 1/W``.  At least one of
    each kind keeps H and exp(H) irrational, so R is unique up to a constant.

    With an exponential part, ``G = exp(A/B) * prod(p_i^(n_i+1)) * B^2`` and
    ``N = G_y / R``, ``M = -G_x / R``; here ``n_i`` is drawn from +-1, +-2.

    Instances whose components share a factor or whose divergence vanishes are
    skipped (the generator draws again from the same stream).
    """
    rng = random.Random(seed)
    while True:
        use_exp = rng.random() < 0.25 if with_exp is None else with_exp
        k = rng.randint(1 if use_exp else 2, max(max_factors, 1 if use_exp else 2))
        degs = [rng.randint(1, max_deg) for _ in range(k)]
        if sum(degs) > max_total:
            continue
        ps = []
        for d in degs:
            for _ in range(50):
                p = normalize_primitive(random_poly(rng, d, rng.randint(2, 4)))
                if _irreducible_ok(p) and p not in ps:
                    break
            else:
                p = None
            if p is None:
                break
            ps.append(p)
        if len(ps) != k:
            continue
        if any(gcd(a, b).degree() > 0 for i, a in enumerate(ps) for b in ps[i + 1:]):
            continue
        if use_exp:
            ns = [rng.choice([-2, -1, 1, 2]) for _ in ps]
            small = [i for i, p in enumerate(ps) if p.degree() <= 2]
            if not small:
                continue
            B = ps[rng.choice(small)]
            A = random_poly(rng, rng.randint(0, 2), 2, require_degree=False)
            if A.is_zero() or gcd(A, B).degree() > 0:
                continue
            D0 = _build(ps, ns, A, B)
            exp_part = RatFunc(A, B)
        else:
            ns = [rng.choice([-2, -1]) for _ in ps]
            if len(set(ns)) == 1:
                i = rng.randrange(k)
                ns[i] = -3 - ns[i]
            D0 = _build_darboux(rng, ps, ns)
            exp_part = None
        if D0 is None:
            continue
        return PlantedField(D0, ps, ns, exp_part, seed)


def _build_darboux(rng, ps, ns) -> Optional[VectorField]:
    # W dH with H = U/V + sum c_i log p_i, W = V^2 * prod(log factors)
    poles = [p for p, n in zip(ps, ns) if n == -2]
    logs = [p for p, n in zip(ps, ns) if n == -1]
    V = BivarPoly.one()
    for p in poles:
        V = V * p
    U = random_poly(rng, rng.randint(0, V.degree()), rng.randint(1, 3), require_degree=False)
    if U.is_zero() or gcd(U, V).degree() > 0:
        return None
    L = BivarPoly.one()
    for p in logs:
        L = L * p
    cs = [rng.choice([-2, -1, 1, 2]) for _ in logs]
    comps = []
    for v in ("x", "y"):
        acc = L * (V * U.diff(v) - U * V.diff(v))
        for p, c in zip(logs, cs):
            acc = acc + V * V * exact_div(L, p) * p.diff(v).scale(c)
        comps.append(acc)
    M, N = comps[0], -comps[1]
    if N.is_zero() or M.is_zero() or gcd(N, M).degree() > 0:
        return None
    D0 = VectorField(N, M)
    if (D0.M.diff("y") + D0.N.diff("x")).is_zero():
        return None
    return D0


def _build(ps, ns, A, B) -> Optional[VectorField]:
    # N = F_y + F * (sum n_i p_i,y / p_i + (A/B)_y) with F = B^2 * prod(p_i)
    prod = BivarPoly.one()
    for p in ps:
        prod = prod * p
    Bp = B if B is not None else BivarPoly.one()
    F = Bp * Bp * prod
    comps = []
    for v in ("y", "x"):
        acc = F.diff(v)
        for p, n in zip(ps, ns):
            acc = acc + exact_div(F, p) * p.diff(v).scale(n)
        if A is not None:
            acc = acc + prod * (A.diff(v) * Bp - A * Bp.diff(v))
        comps.append(acc)
    N, M = comps[0], -comps[1]
    if N.is_zero() or M.is_zero() or gcd(N, M).degree() > 0:
        return None
    D0 = VectorField(N, M)
    if (D0.M.diff("y") + D0.N.diff("x")).is_zero():
        return None
    return D0
