"""Integrating factors built from Darboux polynomials, and first integrals.

An integrating factor has the shape ``exp(A/B) * prod(p_i^n_i)``.  Its
logarithmic derivative along ``D0`` is ``D0(A/B) + sum(n_i*q_i)``, so the
condition ``D0(R) = -R*T0`` is linear in the exponents and in the
coefficients of ``A`` once ``B`` is fixed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .ansatz import Assignment, ParamExpr, ParamPoly, PolySystem, collect, fresh_symbol, \
    generic_candidate, substitute
from .darboux import DarbouxPair, VectorField, apply, divergence_T
from .errors import Inconsistent, NoAlgebraicIF, NoDarbouxIF, QuadratureNotClosed
from .linsolve import solve_linear
from .poly import BivarPoly, try_exact_div
from .ratfunc import RatFunc


@dataclass
class IntegratingFactor:
    """``exp(exp_part) * prod(p**n for p, n in factors)``."""

    factors: List[Tuple[BivarPoly, "mpq"]] = field(default_factory=list)
    exp_part: Optional[RatFunc] = None

    def __post_init__(self):
        seen = set()
        for p, _ in self.factors:
            if p.is_constant():
                raise ValueError("constant factor in integrating factor")
            if p in seen:
                raise ValueError(f"repeated factor {p}")
            seen.add(p)

    def exponents(self) -> List["mpq"]:
        return [n for _, n in self.factors]

    def is_algebraic(self) -> bool:
        return self.exp_part is None or self.exp_part.is_zero()

    def has_integer_exponents(self) -> bool:
        return all(n.denominator == 1 for _, n in self.factors)

    def as_ratfunc(self) -> RatFunc:
        """The algebraic part as a rational function (integer exponents only)."""
        if not self.has_integer_exponents():
            raise ValueError("fractional exponents")
        num, den = BivarPoly.one(), BivarPoly.one()
        for p, n in self.factors:
            k = int(n)
            if k > 0:
                num = num * p ** k
            elif k < 0:
                den = den * p ** (-k)
        return RatFunc(num, den)

    def __str__(self):
        parts = []
        if not self.is_algebraic():
            parts.append(f"exp({self.exp_part})")
        for p, n in self.factors:
            e = str(n) if n.denominator == 1 else f"({n})"
            parts.append(f"({p})^{e}")
        return "*".join(parts) if parts else "1"


@dataclass
class FirstIntegral:
    """``rational_part + sum(c*ln(p) for c, p in log_terms)``."""

    rational_part: RatFunc
    log_terms: List[Tuple["mpq", BivarPoly]] = field(default_factory=list)

    def is_constant(self) -> bool:
        return (self.rational_part.num.is_constant() and self.rational_part.den.is_constant()
                and not any(c for c, _ in self.log_terms))

    def diff(self, var: str) -> RatFunc:
        out = self.rational_part.diff(var)
        for c, p in self.log_terms:
            out = out + RatFunc(p.diff(var).scale(c), p)
        return out

    def __str__(self):
        parts = []
        if not self.rational_part.is_zero():
            parts.append(str(self.rational_part))
        for c, p in self.log_terms:
            parts.append(f"{c}*ln({p})")
        return " + ".join(parts) if parts else "0"


# -- exponent solves ------------------------------------------------------------

def _cofactors(dps: Sequence[DarbouxPair], D0: VectorField) -> List[BivarPoly]:
    out = []
    for d in dps:
        q = try_exact_div(apply(D0, d.p), d.p)
        if q is None:
            raise ValueError(f"{d.p} is not a Darboux polynomial of the field")
        out.append(q)
    return out


def _exponent_report(qs, T0):
    syms = [fresh_symbol(f"n{i}") for i in range(len(qs))]
    eq = ParamPoly.from_poly(T0)
    for s, q in zip(syms, qs):
        eq = eq + ParamPoly.from_poly(q) * ParamExpr.sym(s)
    try:
        return syms, solve_linear(collect(eq, [s.id for s in syms]))
    except Inconsistent:
        return syms, None


def _exponent_solve(dps, qs, T0) -> Optional[List["mpq"]]:
    syms, rep = _exponent_report(qs, T0)
    if rep is None:
        return None
    return _exponent_vector(syms, rep, {f.id: 0 for f in rep.free_symbols})


def _exponent_vector(syms, rep, values) -> List["mpq"]:
    a = Assignment(values)
    out = []
    for s in syms:
        v = rep.solution.get(s.id)
        if v is None:
            out.append(mpq(values.get(s.id, 0)))
        else:
            out.append(v.subs(a).constant())
    return out


def _exponent_candidates(qs, T0, grid: int = 3, cap: int = 4000):
    """Exponent vectors solving the cofactor equation: the particular one, and on a
    solution family also a small lattice of points looking for integer vectors."""
    syms, rep = _exponent_report(qs, T0)
    if rep is None:
        return []
    free = sorted(f.id for f in rep.free_symbols)
    base = _exponent_vector(syms, rep, {f: 0 for f in free})
    out = [base]
    if not free or len(free) > 2:
        return out
    den = 1
    for f in free:
        unit = _exponent_vector(syms, rep, {g: (1 if g == f else 0) for g in free})
        for u, b in zip(unit, base):
            den = math.lcm(den, int((u - b).denominator))
    for b in base:
        den = math.lcm(den, int(b.denominator))
    steps = [mpq(k, den) for k in range(-grid * den, grid * den + 1)]
    if len(steps) ** len(free) > cap:
        return out
    for vals in itertools.product(steps, repeat=len(free)):
        out.append(_exponent_vector(syms, rep, dict(zip(free, vals))))
    return out


def solve_exponents(dps: Sequence[DarbouxPair], D0: VectorField,
                    max_subset_search: int = 10) -> IntegratingFactor:
    """Rational ``n_i`` with ``sum(n_i*q_i) + T0 = 0``.

    When the cofactors are linearly dependent (a rational first integral
    exists) the exponents are not unique.  Integer vectors are preferred, then
    the fewest nonzero entries, ties broken by total degree and number of
    terms of the factors used and then by the size of the exponents.
    """
    T0 = divergence_T(D0)
    qs = _cofactors(dps, D0)
    full = _exponent_solve(dps, qs, T0)
    if full is None:
        raise NoAlgebraicIF("no exponents cancel the divergence")
    best = None
    if len(dps) <= max_subset_search:
        fallback = None
        for k in range(0, len(dps) + 1):
            cands = []
            for idx in itertools.combinations(range(len(dps)), k):
                deg = sum(dps[i].p.degree() for i in idx)
                terms = sum(len(dps[i].p) for i in idx)
                for sub in _exponent_candidates([qs[i] for i in idx], T0):
                    if k and not all(sub):
                        continue
                    integral = all(n.denominator == 1 for n in sub)
                    key = (deg, terms, sum(abs(n) for n in sub), [str(dps[i].p) for i in idx])
                    cands.append((not integral, key, idx, sub))
            if not cands:
                continue
            c = min(cands, key=lambda t: (t[0], t[1]))
            if not c[0]:
                best = c
                break
            if fallback is None:
                fallback = c
        best = best or fallback
        if best is not None:
            best = [(dps[i].p, n) for i, n in zip(best[2], best[3])]
    if best is None:
        best = [(d.p, n) for d, n in zip(dps, full) if n]
    return IntegratingFactor(best)


def _b_candidates(dps: Sequence[DarbouxPair], max_exp: int, deg_cap: int):
    """Exponent vectors for ``B``, lowest total degree first, then multiplicity-guided order."""
    degs = [d.p.degree() for d in dps]
    vecs = []
    for m in itertools.product(range(max_exp + 1), repeat=len(dps)):
        if not any(m):
            continue
        tot = sum(a * b for a, b in zip(m, degs))
        if tot <= deg_cap:
            # a factor seen squared in the inverse factor hints at a simple pole of A/B
            hint = sum(1 for a, d in zip(m, dps) if a == 1 and d.multiplicity >= 2)
            vecs.append((tot, -hint, m))
    vecs.sort()
    return [v[2] for v in vecs]


def solve_exp_part(dps: Sequence[DarbouxPair], D0: VectorField, degA_max: Optional[int] = None,
                   max_exp: int = 2, include_polynomial: bool = True) -> IntegratingFactor:
    """``B_c*D(A_c) - A_c*D(B_c) + B_c^2*(sum(n_i*q_i) + T0) = 0`` over candidate ``B_c``.

    With ``B_c = prod(p_i^m_i)`` the equation is divided by ``B_c`` first,
    leaving ``D(A_c) - A_c*sum(m_i*q_i) + B_c*(sum(n_i*q_i) + T0) = 0``.
    """
    if not dps:
        raise NoDarbouxIF("no Darboux polynomials")
    T0 = divergence_T(D0)
    qs = _cofactors(dps, D0)
    deg_cap = sum(d.p.degree() for d in dps)
    cands = ([tuple(0 for _ in dps)] if include_polynomial else []) + _b_candidates(dps, max_exp, deg_cap)
    for m in cands:
        B = BivarPoly.one()
        qB = BivarPoly.zero()
        for d, q, k in zip(dps, qs, m):
            if k:
                B = B * d.p ** k
                qB = qB + q.scale(k)
        da = degA_max if degA_max is not None else B.degree() + 1
        if da < 0:
            continue
        A, asyms = generic_candidate(da, "A")
        nsyms = [fresh_symbol(f"n{i}") for i in range(len(dps))]
        s = ParamPoly.from_poly(T0)
        for n, q in zip(nsyms, qs):
            s = s + ParamPoly.from_poly(q) * ParamExpr.sym(n)
        eq = apply(D0, A) - A * qB + s * B
        unknowns = [t.id for t in asyms + nsyms]
        try:
            rep = solve_linear(collect(eq, unknowns))
        except Inconsistent:
            continue
        free = sorted(t.id for t in rep.free_symbols)
        choices = [{}] + [{f: 1} for f in free]
        for ch in choices:
            a = Assignment({f: ch.get(f, 0) for f in free})
            full = rep.solution.compose(a) if len(a) else rep.solution
            Af = substitute(substitute(A, rep.solution), a).to_poly()
            Z = RatFunc(Af, B)
            if Z.num.is_zero() or (Z.den.is_constant() and Z.num.is_constant()):
                continue
            factors = []
            for d, n in zip(dps, nsyms):
                v = full.get(n.id)
                c = mpq(0) if v is None else v.subs(a).constant()
                if c:
                    factors.append((d.p, c))
            R = IntegratingFactor(factors, Z)
            if verify_if(R, D0):
                return R
    raise NoDarbouxIF("no exponential factor over the candidate denominators")


def find_integrating_factor(dps: Sequence[DarbouxPair], D0: VectorField) -> Optional[IntegratingFactor]:
    """Algebraic factor first, then the exponential stage; ``None`` if neither works."""
    if not dps:
        return None
    try:
        R = solve_exponents(dps, D0)
        if verify_if(R, D0):
            return R
    except NoAlgebraicIF:
        pass
    try:
        return solve_exp_part(dps, D0)
    except NoDarbouxIF:
        return None


# -- verification ------------------------------------------------------------------

def verify_if(R: IntegratingFactor, D0: VectorField) -> bool:
    """``D0(A/B) + sum(n_i*q_i) + T0 == 0``."""
    total = RatFunc(divergence_T(D0))
    for p, n in R.factors:
        q = try_exact_div(apply(D0, p), p)
        if q is None:
            return False
        total = total + RatFunc(q.scale(n))
    if not R.is_algebraic():
        total = total + apply(D0, R.exp_part)
    return total.is_zero()


def verify_fi(I: FirstIntegral, D0: VectorField) -> bool:
    return (RatFunc(D0.N) * I.diff("x") + RatFunc(D0.M) * I.diff("y")).is_zero()


# -- quadrature ---------------------------------------------------------------------

def first_integral(R: IntegratingFactor, D0: VectorField, ansatz_bound: int = 1) -> FirstIntegral:
    """``A'/B' + sum(c_j*ln(p_j))`` with ``I_x = R*M0`` and ``I_y = -R*N0``.

    ``B'`` collects the poles of ``R`` lowered by one and the logarithms come
    from its simple-pole part; both equations are multiplied by the
    denominator of ``R`` so the system is polynomial and linear.
    """
    if not R.is_algebraic():
        raise QuadratureNotClosed("exponential integrating factor")
    if not R.has_integer_exponents():
        raise QuadratureNotClosed("fractional exponents")
    if not verify_if(R, D0):
        raise ValueError("not an integrating factor")
    pos, neg = BivarPoly.one(), []
    for p, n in R.factors:
        if n > 0:
            pos = pos * p ** int(n)
        elif n < 0:
            neg.append((p, int(-n)))
    Bp = BivarPoly.one()
    L = BivarPoly.one()
    for p, k in neg:
        Bp = Bp * p ** (k - 1)
        L = L * p
    Pm = Bp * L
    rdeg = pos.degree() + D0.degree() - Pm.degree()
    dA = max(Bp.degree() + rdeg + 1, 0) + ansatz_bound
    A, asyms = generic_candidate(dA, "W")
    csyms = [fresh_symbol(f"c{i}") for i in range(len(neg))]
    cofs = {}
    for v in ("x", "y"):
        # L * B'_v / B' and L * p_v / p for each pole factor
        sB = BivarPoly.zero()
        logs = ParamPoly()
        for (p, k), c in zip(neg, csyms):
            Lp = try_exact_div(L, p)
            pv = p.diff(v) * Lp
            if k > 1:
                sB = sB + pv.scale(k - 1)
            logs = logs + ParamPoly.from_poly(pv * Bp) * ParamExpr.sym(c)
        rhs = pos * (D0.M if v == "x" else -D0.N)
        cofs[v] = A.diff(v) * L - A * sB + logs - ParamPoly.from_poly(rhs)
    unknowns = [s.id for s in asyms + csyms]
    eqs = collect(cofs["x"], unknowns).equations + collect(cofs["y"], unknowns).equations
    try:
        rep = solve_linear(PolySystem(eqs, unknowns))
    except Inconsistent as exc:
        raise QuadratureNotClosed("first integral outside the rational-plus-logarithm ansatz") from exc
    zero = Assignment({s.id: 0 for s in rep.free_symbols})
    Af = substitute(substitute(A, rep.solution), zero).to_poly()
    logs = []
    for (p, _), c in zip(neg, csyms):
        v = rep.solution.get(c.id)
        cv = mpq(0) if v is None else v.subs(zero).constant()
        if cv:
            logs.append((cv, p))
    I = FirstIntegral(RatFunc(Af, Bp), logs)
    if I.is_constant() or not verify_fi(I, D0):
        raise QuadratureNotClosed("quadrature produced no valid first integral")
    return I


def exponential_first_integral(R: IntegratingFactor, D0: VectorField, slack: int = 1) -> Optional[RatFunc]:
    """Rational ``S`` with ``exp(A/B) * S`` a first integral, for ``R = exp(A/B) * prod(p^n)``.

    ``S = W / Dn`` where ``Dn`` lowers each pole of R outside B by one, and
    ``dS + S*d(A/B) = prod(p^n)*(M dx - N dy)`` is linear in the coefficients of W.
    Returns ``None`` when no such S exists within the degree bound.
    """
    if R.is_algebraic() or not R.has_integer_exponents():
        return None
    A, B = R.exp_part.num, R.exp_part.den
    pos, neg, Dn = BivarPoly.one(), BivarPoly.one(), BivarPoly.one()
    for p, n in R.factors:
        k = int(n)
        if k > 0:
            pos = pos * p ** k
        elif k < 0:
            neg = neg * p ** (-k)
            if try_exact_div(B, p) is None:
                Dn = Dn * p ** (-k - 1)
    dW = max(pos.degree() + D0.degree() + Dn.degree() - neg.degree() + 1, 0) + slack
    W, wsyms = generic_candidate(dW, "S")
    eqs = []
    for v, rhs in (("x", D0.M), ("y", -D0.N)):
        dAB = A.diff(v) * B - A * B.diff(v)
        lhs = (W.diff(v) * Dn - W * Dn.diff(v)) * (neg * B * B) + W * (Dn * neg * dAB)
        eq = lhs - ParamPoly.from_poly(pos * rhs * Dn * Dn * B * B)
        eqs += collect(eq, [t.id for t in wsyms]).equations
    try:
        rep = solve_linear(PolySystem(eqs, [t.id for t in wsyms]))
    except Inconsistent:
        return None
    zero = Assignment({t.id: 0 for t in rep.free_symbols})
    Wf = substitute(substitute(W, rep.solution), zero).to_poly()
    if Wf.is_zero():
        return None
    return RatFunc(Wf, Dn)
