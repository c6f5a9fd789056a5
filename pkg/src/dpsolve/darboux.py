"""Vector fields, associated fields and the Darboux polynomial searches.

A field ``D = N d/dx + M d/dy`` corresponds to the ODE ``y' = M/N``.  The
associated-field methods look for a second field ``D1 = N1 d/dx + M1 d/dy``
such that ``Delta = M0*N1 - M1*N0`` equals ``I*T0`` with ``T0`` the
divergence of ``D0`` and ``I`` a polynomial (stage E1), then impose one of
three second-stage equations (E2).  ``I`` is a product of Darboux
polynomials of ``D0``; CoLin instead recovers them through the cofactor
relation between both fields (stages E3 and E4).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .ansatz import (Assignment, ParamExpr, ParamPoly, PolySystem, collect, generic_candidate,
                     raw_symbols, substitute)
from .deadline import NEVER, Deadline
from .errors import (DeadlineExceeded, DegenerateFieldPair, DivergenceFreeField, Exhausted,
                     IncompleteSplit, Inconsistent, MethodFailed, NoAlgebraicIF, NoAssociatedField,
                     NotDivisible, QuadratureNotClosed)
from .linsolve import LinearSolveReport, solve_linear
from .poly import BivarPoly, grlex_key, normalize_primitive, try_exact_div
from .polysys import SolveBudget, SolutionFamily, solve_poly_system_report
from .prs import gcd, lcm
from .ratfunc import RatFunc

METHODS = ("colin", "singer", "impa", "muc")
AUTO_ORDER = ("impa", "singer", "colin", "muc")


# -- fields -----------------------------------------------------------------------

@dataclass(frozen=True)
class VectorField:
    """``N d/dx + M d/dy``."""

    N: BivarPoly
    M: BivarPoly

    def __post_init__(self):
        if self.N.is_zero() and self.M.is_zero():
            raise ValueError("vector field with both components zero")

    @classmethod
    def from_ratfunc(cls, phi: RatFunc) -> "VectorField":
        return cls(N=phi.den, M=phi.num)

    @classmethod
    def from_ode(cls, text: str) -> "VectorField":
        from .parse import parse_expr
        return cls.from_ratfunc(parse_expr(text))

    def degree(self) -> int:
        return max(self.M.degree(), self.N.degree())

    def scaled(self, c) -> "VectorField":
        return VectorField(self.N.scale(c), self.M.scale(c))

    def __call__(self, f):
        return apply(self, f)

    def __str__(self):
        return f"({self.N})*d/dx + ({self.M})*d/dy"


def apply(D: VectorField, f):
    """``N*f_x + M*f_y`` for BivarPoly, RatFunc or ParamPoly ``f``."""
    if isinstance(f, RatFunc):
        return RatFunc(D.N) * f.diff("x") + RatFunc(D.M) * f.diff("y")
    if isinstance(f, ParamPoly):
        return f.diff("x") * D.N + f.diff("y") * D.M
    return D.N * f.diff("x") + D.M * f.diff("y")


def apply_param(N, M, f):
    """Field application where the components themselves may be ParamPolys."""
    fx, fy = f.diff("x"), f.diff("y")
    return _pmul(N, fx) + _pmul(M, fy)


def _pmul(a, b):
    if isinstance(a, BivarPoly) and isinstance(b, BivarPoly):
        return a * b
    if isinstance(a, BivarPoly):
        return b * a
    return a * b


def divergence_T(D: VectorField) -> BivarPoly:
    return D.M.diff("y") + D.N.diff("x")


def delta(D0: VectorField, D1: VectorField) -> BivarPoly:
    return D0.M * D1.N - D1.M * D0.N


def commutator_coeffs(D0: VectorField, D1: VectorField) -> Tuple[RatFunc, RatFunc]:
    """``F0, F1`` with ``[D0, D1] = F0*D0 + F1*D1``."""
    dl = delta(D0, D1)
    if dl.is_zero():
        raise DegenerateFieldPair("M0*N1 - M1*N0 vanishes identically")
    a = apply(D0, D1.M) - apply(D1, D0.M)   # [D0,D1] y
    b = apply(D0, D1.N) - apply(D1, D0.N)   # [D0,D1] x
    F0 = RatFunc(D1.N * a - D1.M * b, dl)
    F1 = RatFunc(D0.M * b - D0.N * a, dl)
    return F0, F1


# -- records ----------------------------------------------------------------------

@dataclass
class DarbouxPair:
    p: BivarPoly
    q0: BivarPoly
    q1: Optional[BivarPoly] = None
    multiplicity: int = 1

    def check(self, D0: VectorField, D1: Optional[VectorField] = None) -> bool:
        if self.p.is_constant() or self.p != normalize_primitive(self.p):
            return False
        if apply(D0, self.p) != self.q0 * self.p:
            return False
        if self.q1 is not None and D1 is not None:
            return apply(D1, self.p) == self.q1 * self.p
        return True

    def __str__(self):
        return f"{self.p} (cofactor {self.q0})"


@dataclass
class AssociatedFieldSolution:
    d1: VectorField
    inv_factor: BivarPoly
    cofactor_of_inv: Optional[BivarPoly] = None
    provenance: str = ""


@dataclass
class SearchConfig:
    dg: Optional[int] = None
    dp_max: int = 10
    method: str = "singer"
    budget: SolveBudget = field(default_factory=SolveBudget)
    dg_max: Optional[int] = None
    time_limit: Optional[float] = None
    heuristic_threshold: int = 4
    colin_dp_max: Optional[int] = None
    exp_lookahead: int = 2

    def __post_init__(self):
        if self.dg is not None and self.dg < 1:
            raise ValueError("dg must be at least 1")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def d_inv(self) -> int:
        return (self.dg or 1) + 1


@dataclass
class E1Result:
    D0: VectorField
    dg: int
    Mc: ParamPoly
    Nc: ParamPoly
    Ic: ParamPoly
    report: LinearSolveReport
    free: List[int]
    T0: BivarPoly

    def inv_symbols(self) -> List[int]:
        """Free symbols that occur in the inverse-factor candidate, leading monomials first."""
        order = []
        seen = set()
        for m in sorted(self.Ic.terms, key=grlex_key, reverse=True):
            for s in sorted(raw_symbols(self.Ic.terms[m])):
                if s not in seen:
                    seen.add(s)
                    order.append(s)
        return order

    def is_trivial(self) -> bool:
        return self.Ic.is_zero()


@dataclass
class E3Result:
    Q0: ParamPoly
    Q1: ParamPoly
    report: LinearSolveReport
    F0: RatFunc
    F1: RatFunc


@dataclass
class MethodOutcome:
    method: str
    dps: List[DarbouxPair]
    dg_used: Optional[int] = None
    associated: Optional[AssociatedFieldSolution] = None
    integrating_factor: object = None
    stats: Dict[str, float] = field(default_factory=dict)
    diagnostics: List[str] = field(default_factory=list)
    other_dps: List[DarbouxPair] = field(default_factory=list)


def _outcome(method, dps, dg, sol, R, stats, diags) -> MethodOutcome:
    return MethodOutcome(method, list(dps), dg, sol, R, stats, diags)


# -- helpers ----------------------------------------------------------------------

def _as_field(D) -> VectorField:
    return D if isinstance(D, VectorField) else VectorField.from_ratfunc(D)


def _family_polys(fam: SolutionFamily, polys: Sequence[ParamPoly]) -> List[ParamPoly]:
    return [substitute(p, fam.assignment) for p in polys]


def _instantiations(polys: Sequence[ParamPoly], limit: int = 16):
    """Numeric members of an affine family: the particular member, unit vectors, all ones."""
    syms = sorted(set().union(*(p.symbols() for p in polys)))
    if not syms:
        yield [p.to_poly() for p in polys]
        return
    choices = [{s: 0 for s in syms}]
    for s in syms[:limit]:
        choices.append({t: (1 if t == s else 0) for t in syms})
    choices.append({s: 1 for s in syms})
    for ch in choices:
        a = Assignment(ch)
        yield [substitute(p, a).to_poly() for p in polys]


def _dp_pair(D0: VectorField, p: BivarPoly, D1: Optional[VectorField] = None) -> Optional[DarbouxPair]:
    if p.is_constant():
        return None
    p = normalize_primitive(p)
    q0 = try_exact_div(apply(D0, p), p)
    if q0 is None:
        return None
    q1 = None
    if D1 is not None:
        q1 = try_exact_div(apply(D1, p), p)
    return DarbouxPair(p, q0, q1)


def _p_group_order(P: ParamPoly) -> List[int]:
    """Symbols of a generic candidate ordered by decreasing monomial."""
    out = []
    for m in sorted(P.terms, key=grlex_key, reverse=True):
        out.extend(sorted(raw_symbols(P.terms[m])))
    return out


# -- stage E1 ---------------------------------------------------------------------

def stage_E1(D0: VectorField, cfg: Union[SearchConfig, int], deadline: Deadline = NEVER) -> E1Result:
    """Generic ``M_c, N_c`` (degree dg) and ``I_c`` (degree dg+1) constrained by
    ``M0*N_c - M_c*N0 = I_c*T0``."""
    D0 = _as_field(D0)
    dg = cfg if isinstance(cfg, int) else (cfg.dg or 1)
    T0 = divergence_T(D0)
    if T0.is_zero():
        raise DivergenceFreeField("the field has zero divergence")
    Mc, ms = generic_candidate(dg, "m")
    Nc, ns = generic_candidate(dg, "n")
    Ic, ps = generic_candidate(dg + 1, "p")
    eq = Nc * D0.M - Mc * D0.N - Ic * T0
    unknowns = [s.id for s in ms + ns + ps]
    rep = solve_linear(collect(eq, unknowns), deadline)
    a = rep.solution
    Mc1, Nc1, Ic1 = substitute(Mc, a), substitute(Nc, a), substitute(Ic, a)
    free = sorted(s.id for s in rep.free_symbols)
    return E1Result(D0, dg, Mc1, Nc1, Ic1, rep, free, T0)


# -- stage E2 variants -------------------------------------------------------------

def e2_singer_equation(e1: E1Result) -> ParamPoly:
    T1 = e1.Mc.diff("y") + e1.Nc.diff("x")
    return apply_param(e1.Nc, e1.Mc, e1.Ic) - e1.Ic * T1


def e2_colin_equation(e1: E1Result) -> ParamPoly:
    """``D1(Delta) - I*(D1(T0) + T0*T1)`` with ``Delta`` taken from the candidates."""
    D0 = e1.D0
    T1 = e1.Mc.diff("y") + e1.Nc.diff("x")
    dl = e1.Nc * D0.M - e1.Mc * D0.N
    T0p = ParamPoly.from_poly(e1.T0)
    return apply_param(e1.Nc, e1.Mc, dl) - e1.Ic * (apply_param(e1.Nc, e1.Mc, T0p) + T1 * e1.T0)


def e2_impa_equation(e1: E1Result, Q0: ParamPoly, literal: bool = False) -> ParamPoly:
    """``D0(Delta) - I*(D0(T0) + T0*Q0)``; after E1 this equals ``T0*(D0(I) - Q0*I)``,
    and the reduced form is used unless ``literal`` is set."""
    D0 = e1.D0
    if literal:
        dl = e1.Nc * D0.M - e1.Mc * D0.N
        return apply(D0, dl) - e1.Ic * (apply(D0, e1.T0) + Q0 * e1.T0)
    return apply(D0, e1.Ic) - Q0 * e1.Ic


def _solve_e2(e1: E1Result, eq: ParamPoly, extra_unknowns: Sequence[int], group: List[int],
              budget: SolveBudget, deadline: Deadline):
    unknowns = set(e1.free) | set(extra_unknowns)
    unknowns |= eq.symbols()
    system = collect(eq, unknowns)
    return solve_poly_system_report(system, budget, nontrivial=group, projective=[group],
                                    deadline=deadline)


def _associated_from_families(e1: E1Result, families, provenance: str,
                              extra: Optional[ParamPoly] = None) -> List[AssociatedFieldSolution]:
    out = []
    seen = set()
    for fam in families:
        polys = [e1.Mc, e1.Nc, e1.Ic] + ([extra] if extra is not None else [])
        polys = _family_polys(fam, polys)
        for vals in _instantiations(polys):
            M1, N1, I = vals[0], vals[1], vals[2]
            if I.is_constant() or (M1.is_zero() and N1.is_zero()):
                continue
            D1 = VectorField(N1, M1)
            if delta(e1.D0, D1).is_zero():
                continue
            key = (normalize_primitive(I), M1, N1)
            if key in seen:
                continue
            seen.add(key)
            Q0 = vals[3] if extra is not None else None
            out.append(AssociatedFieldSolution(D1, I, Q0, provenance))
    return out


def stage_E2_colin(e1: E1Result, budget: Optional[SolveBudget] = None,
                   deadline: Deadline = NEVER) -> List[AssociatedFieldSolution]:
    budget = budget or SolveBudget()
    if e1.is_trivial():
        raise NoAssociatedField("E1 admits only the zero inverse factor")
    eq = e2_singer_equation(e1)
    # after E1 the CoLin equation is T0 times the SInGeR one; both define the same system
    rep = _solve_e2(e1, eq, (), _e2_group(e1), budget, deadline)
    sols = _associated_from_families(e1, rep.families, "colin")
    if not sols:
        raise NoAssociatedField("no nontrivial associated field" + ("" if rep.complete else f" ({rep.reason})"))
    return sols


def stage_E2_singer(e1: E1Result, budget: Optional[SolveBudget] = None,
                    deadline: Deadline = NEVER) -> List[AssociatedFieldSolution]:
    budget = budget or SolveBudget()
    if e1.is_trivial():
        raise NoAssociatedField("E1 admits only the zero inverse factor")
    eq = e2_singer_equation(e1)
    rep = _solve_e2(e1, eq, (), _e2_group(e1), budget, deadline)
    sols = _associated_from_families(e1, rep.families, "singer")
    if not sols:
        raise NoAssociatedField("no nontrivial associated field" + ("" if rep.complete else f" ({rep.reason})"))
    return sols


def _e2_group(e1: E1Result) -> List[int]:
    order = e1.inv_symbols()
    rest = [s for s in e1.free if s not in set(order)]
    return order + rest


def stage_E2_impa(e1: E1Result, D0: Optional[VectorField] = None, budget: Optional[SolveBudget] = None,
                  deadline: Deadline = NEVER, q0_monomials: Optional[Sequence] = None) -> List[AssociatedFieldSolution]:
    """Inverse factors that are Darboux polynomials of ``D0``; ``Q0`` is their cofactor.

    ``q0_monomials`` restricts the cofactor candidate to a given monomial set.
    """
    budget = budget or SolveBudget()
    D0 = _as_field(D0) if D0 is not None else e1.D0
    if e1.is_trivial():
        raise NoAssociatedField("E1 admits only the zero inverse factor")
    if q0_monomials is None:
        # a cofactor has degree below the field's; the top-degree part would be forced to zero
        Q0, qs = generic_candidate(max(D0.degree() - 1, 0), "q")
    else:
        from .ansatz import candidate_on_monomials
        Q0, qs = candidate_on_monomials(q0_monomials, "q")
    eq = e2_impa_equation(e1, Q0)
    group = e1.inv_symbols()
    rep = _solve_e2(e1, eq, [s.id for s in qs], group, budget, deadline)
    out = []
    seen = set()
    for fam in rep.families:
        Ic, Qf = _family_polys(fam, [e1.Ic, Q0])
        for I, Q in _instantiations([Ic, Qf]):
            if I.is_constant():
                continue
            k = normalize_primitive(I)
            if k in seen:
                continue
            if apply(D0, I) != Q * I:
                continue
            seen.add(k)
            # any field of the E1 family with this inverse factor will do; pick it from the family
            M1, N1 = _field_for_inv(e1, fam, I)
            out.append(AssociatedFieldSolution(VectorField(N1, M1), I, Q, "impa"))
    if not out:
        raise NoAssociatedField("no nontrivial inverse factor" + ("" if rep.complete else f" ({rep.reason})"))
    return out


def _field_for_inv(e1: E1Result, fam: SolutionFamily, I: BivarPoly):
    """Instantiate ``M1, N1`` consistently with the inverse factor ``I``."""
    Mc, Nc, Ic = _family_polys(fam, [e1.Mc, e1.Nc, e1.Ic])
    syms = sorted(Ic.symbols() | Mc.symbols() | Nc.symbols())
    # solve Ic == I for the symbols occurring in Ic; remaining symbols set to 0
    eqs = []
    for m in set(Ic.terms) | set(I.terms):
        e = Ic.coeff(*m) - I.coeff(*m)
        if e.terms:
            eqs.append(e)
    try:
        rep = solve_linear(PolySystem(eqs, syms))
    except Inconsistent:
        return BivarPoly.zero(), BivarPoly.zero()
    a = rep.solution
    zero = Assignment({s: 0 for s in syms if s not in a})
    a = a.compose(zero) if len(zero) else a
    M1 = substitute(substitute(Mc, a), zero).to_poly()
    N1 = substitute(substitute(Nc, a), zero).to_poly()
    return M1, N1


# -- stage E3 / E4 ---------------------------------------------------------------------

def stage_E3_cofactors(D0: VectorField, D1: VectorField, deadline: Deadline = NEVER) -> E3Result:
    """Cofactor families ``(Q0, Q1)`` satisfying ``D0(Q1) - D1(Q0) = Q0*F0 + Q1*F1``."""
    D0, D1 = _as_field(D0), _as_field(D1)
    F0, F1 = commutator_coeffs(D0, D1)
    d0 = max(D0.degree() - 1, 0)
    d1 = max(D1.degree() - 1, 0)
    Q0, s0 = generic_candidate(d0, "a")
    Q1, s1 = generic_candidate(d1, "b")
    L = lcm(F0.den, F1.den)
    c0 = try_exact_div(L, F0.den)
    c1 = try_exact_div(L, F1.den)
    lhs = apply(D0, Q1) - apply_param(D1.N, D1.M, Q0)
    eq = lhs * L - Q0 * (F0.num * c0) - Q1 * (F1.num * c1)
    rep = solve_linear(collect(eq, [s.id for s in s0 + s1]), deadline)
    return E3Result(substitute(Q0, rep.solution), substitute(Q1, rep.solution), rep, F0, F1)


def stage_E4_dps(D1: VectorField, Q1_family: ParamPoly, dp_degree: int,
                 budget: Optional[SolveBudget] = None, D0: Optional[VectorField] = None,
                 Q0_family: Optional[ParamPoly] = None, deadline: Deadline = NEVER) -> List[DarbouxPair]:
    """Polynomials of degree ``dp_degree`` with ``D1(P) = Q1*P`` for some member of the family."""
    if dp_degree < 1:
        raise ValueError("dp_degree must be at least 1")
    budget = budget or SolveBudget()
    P, ps = generic_candidate(dp_degree, "P")
    eq = apply(D1, P) - Q1_family * P
    group = _p_group_order(P)
    unknowns = set(group) | Q1_family.symbols()
    rep = solve_poly_system_report(collect(eq, unknowns), budget, nontrivial=group,
                                   projective=[group], deadline=deadline)
    out: List[DarbouxPair] = []
    seen = set()
    for fam in rep.families:
        (Pf,) = _family_polys(fam, [P])
        for (p,) in _instantiations([Pf]):
            if p.is_constant():
                continue
            p = normalize_primitive(p)
            if p in seen:
                continue
            seen.add(p)
            if D0 is not None:
                pair = _dp_pair(D0, p, D1)
                if pair is not None:
                    out.append(pair)
            else:
                q1 = try_exact_div(apply(D1, p), p)
                out.append(DarbouxPair(p, BivarPoly.zero(), q1))
    if not rep.complete and not out:
        raise Exhausted(rep.reason)
    return out


# -- splitting an inverse factor ----------------------------------------------------------

def squarefree_part(f: BivarPoly) -> BivarPoly:
    g = gcd(gcd(f, f.diff("x")), f.diff("y")) if not f.is_constant() else BivarPoly.one()
    return normalize_primitive(try_exact_div(f, g))


def cofactor_span(H: BivarPoly, D0: VectorField, deadline: Deadline = NEVER) -> List[BivarPoly]:
    """Basis of the cofactors ``sum(l_i * q_i)`` of the factors ``p_i`` of a squarefree
    Darboux polynomial ``H``.

    These come from the closed rational 1-forms ``(g dx + h dy)/H`` with
    ``deg g, deg h < deg H``, which are exactly ``sum(l_i dp_i/p_i)``; the
    combination of cofactors is ``(N*g + M*h)/H``.
    """
    n = H.degree()
    d = max(D0.degree() - 1, 0)
    g, gs = generic_candidate(n - 1, "g")
    h, hs = generic_candidate(n - 1, "h")
    c, cs = generic_candidate(d, "c")
    closed = (g.diff("y") - h.diff("x")) * H - g * H.diff("y") + h * H.diff("x")
    cof = g * D0.N + h * D0.M - c * H
    eqs = collect(closed, None).equations + collect(cof, None).equations
    unknowns = [s.id for s in gs + hs + cs]
    rep = solve_linear(PolySystem(eqs, unknowns), deadline)
    cfam = substitute(c, rep.solution)
    basis = []
    free = sorted(cfam.symbols())
    for s in free:
        a = Assignment({t: (1 if t == s else 0) for t in free})
        v = substitute(cfam, a).to_poly()
        if not v.is_zero():
            basis.append(v)
    return _independent(basis)


def _independent(polys: List[BivarPoly]) -> List[BivarPoly]:
    out = []
    rows = []  # echelon rows over monomials
    for p in polys:
        vec = dict(p.terms)
        for piv, row in rows:
            c = vec.get(piv)
            if c:
                for m, v in row.items():
                    nv = vec.get(m, 0) - c * v
                    if nv:
                        vec[m] = nv
                    else:
                        vec.pop(m, None)
        if vec:
            piv = max(vec, key=grlex_key)
            inv = 1 / vec[piv]
            rows.append((piv, {m: v * inv for m, v in vec.items()}))
            out.append(p)
    return out


def _dps_in_factor(H: BivarPoly, D0: VectorField, dp_max: int, budget: SolveBudget,
                   deadline: Deadline) -> Tuple[List[BivarPoly], BivarPoly]:
    """Darboux factors of the squarefree Darboux polynomial ``H`` by a degree sweep."""
    found: List[BivarPoly] = []
    res = H
    span = cofactor_span(res, D0, deadline)
    if len(span) == 1 and res.degree() <= dp_max:
        return [res], BivarPoly.one()
    k = 1
    while not res.is_constant() and k <= min(dp_max, res.degree()):
        if k == res.degree():
            found.append(res)
            res = BivarPoly.one()
            break
        P, ps = generic_candidate(k, "P")
        if span:
            mus = [ParamExpr.sym(s) for s in _fresh_many("mu", len(span))]
            q = ParamPoly()
            for mu, c in zip(mus, span):
                q = q + ParamPoly.from_poly(c) * mu
        else:
            q = ParamPoly()
        eq = apply(D0, P) - q * P
        group = _p_group_order(P)
        rep = solve_poly_system_report(collect(eq, None), budget, nontrivial=group,
                                       projective=[group], deadline=deadline)
        new = []
        for fam in rep.families:
            (Pf,) = _family_polys(fam, [P])
            for (p,) in _instantiations([Pf]):
                if p.degree() != k:
                    continue
                p = normalize_primitive(p)
                if p in new:
                    continue
                new.append(p)
        for p in sorted(new, key=lambda t: sorted(t.terms.items())):
            qd = try_exact_div(res, p)
            if qd is not None and not p.is_constant():
                found.append(p)
                res = normalize_primitive(qd) if not qd.is_constant() else BivarPoly.one()
        k += 1
    return found, res


def _fresh_many(prefix: str, n: int):
    from .ansatz import fresh_symbol
    return [fresh_symbol(f"{prefix}{i}") for i in range(n)]


def extract_dps_from_inv_factor(I: BivarPoly, D0: VectorField, Q0: Optional[BivarPoly] = None,
                                dp_max: Optional[int] = None, budget: Optional[SolveBudget] = None,
                                deadline: Deadline = NEVER) -> List[DarbouxPair]:
    """Split a Darboux polynomial into its Darboux factors with multiplicities.

    Raises :class:`IncompleteSplit` (carrying the factors found) when a
    non-constant residual remains after the sweep.
    """
    D0 = _as_field(D0)
    budget = budget or SolveBudget()
    if I.is_zero():
        raise ValueError("zero inverse factor")
    if I.is_constant():
        return []
    QI = Q0 if Q0 is not None else try_exact_div(apply(D0, I), I)
    if QI is None or apply(D0, I) != QI * I:
        raise NotDivisible("the inverse factor is not a Darboux polynomial")
    dp_max = dp_max if dp_max is not None else I.degree()
    factors: List[BivarPoly] = []
    rest = normalize_primitive(I)
    # monomial factors first
    for v in (BivarPoly.x(), BivarPoly.y()):
        if try_exact_div(rest, v) is not None:
            factors.append(v)
            while True:
                qd = try_exact_div(rest, v)
                if qd is None:
                    break
                rest = qd
    if not rest.is_constant():
        rest = normalize_primitive(rest)
        H = squarefree_part(rest)
        found, residual = _dps_in_factor(H, D0, dp_max, budget, deadline)
        factors.extend(found)
    else:
        residual = BivarPoly.one()
    pairs = []
    for p in factors:
        pair = _dp_pair(D0, p)
        if pair is None:
            continue
        m = 0
        cur = I
        while True:
            qd = try_exact_div(cur, p)
            if qd is None:
                break
            cur = qd
            m += 1
        pair.multiplicity = m
        pairs.append(pair)
    pairs.sort(key=lambda t: (t.p.degree(), str(t.p)))
    if not residual.is_constant():
        raise IncompleteSplit("inverse factor not fully split", found=pairs, residual=residual)
    return pairs


# -- baselines ---------------------------------------------------------------------------

def muc_baseline(D0: VectorField, dp_degree: int, budget: Optional[SolveBudget] = None,
                 deadline: Deadline = NEVER, q_monomials: Optional[Sequence] = None) -> List[DarbouxPair]:
    """``D0(p) = q*p`` with generic ``p`` of degree ``dp_degree`` and generic cofactor."""
    D0 = _as_field(D0)
    if dp_degree < 1:
        raise ValueError("dp_degree must be at least 1")
    budget = budget or SolveBudget()
    P, ps = generic_candidate(dp_degree, "P")
    if q_monomials is None:
        q, qs = generic_candidate(max(D0.degree() - 1, 0), "q")
    else:
        from .ansatz import candidate_on_monomials
        q, qs = candidate_on_monomials(q_monomials, "q")
    eq = apply(D0, P) - q * P
    group = _p_group_order(P)
    rep = solve_poly_system_report(collect(eq, [s.id for s in ps + qs]), budget, nontrivial=group,
                                   projective=[group], deadline=deadline)
    out = []
    seen = set()
    for fam in rep.families:
        (Pf,) = _family_polys(fam, [P])
        for (p,) in _instantiations([Pf]):
            pair = _dp_pair(D0, p)
            if pair is None or pair.p in seen:
                continue
            seen.add(pair.p)
            out.append(pair)
    if not rep.complete:
        exc = Exhausted(rep.reason)
        exc.partial = out
        raise exc
    return out


def irreducible_dps(pairs: Sequence[DarbouxPair], D0: VectorField) -> List[DarbouxPair]:
    """Drop products of lower-degree Darboux polynomials, keeping new cofactors of them."""
    base: List[BivarPoly] = []
    for pr in sorted(pairs, key=lambda t: (t.p.degree(), str(t.p))):
        r = pr.p
        for b in base:
            while True:
                qd = try_exact_div(r, b)
                if qd is None:
                    break
                r = qd
        if r.is_constant():
            continue
        r = normalize_primitive(r)
        if r not in base:
            base.append(r)
    out = []
    for p in base:
        pair = _dp_pair(D0, p)
        if pair is not None:
            out.append(pair)
    return out


def muc_sweep(D0: VectorField, dp_max: int, budget: Optional[SolveBudget] = None,
              deadline: Deadline = NEVER) -> List[DarbouxPair]:
    found: List[DarbouxPair] = []
    for k in range(1, dp_max + 1):
        deadline.check("muc")
        found.extend(muc_baseline(D0, k, budget, deadline))
        found = irreducible_dps(found, D0)
    return found


def heuristic_rational(D0: VectorField, dp_max: int, threshold: int = 4,
                       budget: Optional[SolveBudget] = None, deadline: Deadline = NEVER) -> List[DarbouxPair]:
    """Cofactor candidates spanned by the monomials of the divergence."""
    D0 = _as_field(D0)
    T0 = divergence_T(D0)
    if T0.is_zero() or len(T0.terms) > threshold:
        return []
    found: List[DarbouxPair] = []
    for k in range(1, dp_max + 1):
        try:
            found.extend(muc_baseline(D0, k, budget, deadline, q_monomials=list(T0.terms)))
        except DeadlineExceeded:
            break
        except Exhausted as exc:
            found.extend(getattr(exc, "partial", []))
        found = irreducible_dps(found, D0)
    return found


# -- driver ---------------------------------------------------------------------------------

def colin_dps(D0: VectorField, sol: AssociatedFieldSolution, dp_max: int, budget: SolveBudget,
              deadline: Deadline) -> List[DarbouxPair]:
    e3 = stage_E3_cofactors(D0, sol.d1, deadline)
    if e3.Q1.is_zero() and e3.Q0.is_zero():
        return []
    found: List[DarbouxPair] = []
    for k in range(1, dp_max + 1):
        deadline.check("colin E4")
        try:
            found.extend(stage_E4_dps(sol.d1, e3.Q1, k, budget, D0=D0, deadline=deadline))
        except Exhausted:
            continue
        found = irreducible_dps(found, D0)
    for pr in found:
        pr.q1 = try_exact_div(apply(sol.d1, pr.p), pr.p)
    return found


def run_method(D0: VectorField, cfg: Optional[SearchConfig] = None,
               deadline: Optional[Deadline] = None) -> MethodOutcome:
    """Outer loop over the candidate degree ``dg`` for one method."""
    from .liouville import find_integrating_factor

    D0 = _as_field(D0)
    cfg = cfg or SearchConfig()
    dl = deadline or Deadline(cfg.time_limit)
    stats: Dict[str, float] = {}
    diags: List[str] = []

    def timed(stage, fn, *args, **kw):
        t = time.process_time()
        try:
            return fn(*args, **kw)
        finally:
            stats[stage] = stats.get(stage, 0.0) + (time.process_time() - t) * 1000

    method = cfg.method
    try:
        if method == "muc":
            dps: List[DarbouxPair] = []
            for k in range(1, cfg.dp_max + 1):
                dl.check("muc")
                try:
                    got = timed("muc", muc_baseline, D0, k, cfg.budget, dl)
                except Exhausted as exc:
                    diags.append(f"muc degree {k}: {exc}")
                    got = getattr(exc, "partial", [])
                    if isinstance(exc, DeadlineExceeded):
                        raise
                dps = irreducible_dps(dps + list(got), D0)
                R = find_integrating_factor(dps, D0)
                if R is not None:
                    return _outcome("muc", dps, None, None, R, stats, diags)
            raise MethodFailed("MUC sweep found no integrating factor", diags)

        T0 = divergence_T(D0)
        if T0.is_zero():
            raise MethodFailed("divergence-free field: the inverse factor Delta/T0 is undefined", diags)
        dg_max = cfg.dg_max or max(D0.degree() * 2, 8)
        # ImpA first restricts its cofactor to the monomials of T0, then retries with a generic one
        passes = [list(T0.terms), None] if method == "impa" else [None]
        for q0_monos in passes:
            out = _dg_loop(D0, cfg, method, dg_max, q0_monos, dl, timed, diags)
            if out is not None:
                out.stats = stats
                return out
        raise MethodFailed(f"{method}: no integrating factor up to dg={dg_max}", diags)
    except DeadlineExceeded as exc:
        diags.append(str(exc))
        raise MethodFailed(f"{method}: {exc}", diags) from exc


def _dg_loop(D0, cfg, method, dg_max, q0_monos, dl, timed, diags) -> Optional[MethodOutcome]:
    from .liouville import find_integrating_factor, solve_exponents, verify_if

    dg = cfg.dg or 1
    best: Optional[MethodOutcome] = None
    while dg <= dg_max:
        if best is not None and dg > best.dg_used + cfg.exp_lookahead:
            return best
        try:
            step = _dg_step(D0, cfg, method, dg, q0_monos, dl, timed, diags)
        except DeadlineExceeded:
            if best is not None:
                return best
            raise
        if step is not None:
            found, first = step
            prev = best.dps + best.other_dps if best is not None else []
            pool = irreducible_dps(list(found.values()) + prev, D0)
            for d in pool:
                if d.p in found:
                    d.multiplicity = found[d.p].multiplicity
                    d.q1 = found[d.p].q1
            if best is None:
                R = timed("IF", find_integrating_factor, pool, D0)
                if R is None:
                    diags.append(f"dg={dg}: no integrating factor from {[str(p.p) for p in pool]}")
                else:
                    best = _outcome(method, pool, dg, first, R, {}, diags)
            else:
                # lookahead: accept only an algebraic factor, and only a sparser one
                try:
                    R = timed("IF", solve_exponents, pool, D0)
                except NoAlgebraicIF:
                    R = None
                if R is not None and verify_if(R, D0) and _sparser(R, best.integrating_factor):
                    best = _outcome(method, pool, dg, first or best.associated, R, {}, diags)
            if best is not None and best.dg_used == dg:
                best = _complete_from_exponential(best, D0, cfg, dl, timed)
                best = _complete_from_rational_fi(best, D0, cfg, dl, timed)
            if best is not None:
                if cfg.exp_lookahead <= 0 or not _wants_lookahead(best, D0):
                    return best
                if best.dg_used == dg:
                    diags.append(f"dg={dg}: integrating factor {best.integrating_factor} "
                                 "is exponential; looking for an algebraic one")
        dg += 1
    return best


def _split_into_dps(polys, D0, cfg, dl) -> List[DarbouxPair]:
    out: List[DarbouxPair] = []
    for part in polys:
        if part.is_constant():
            continue
        try:
            out += extract_dps_from_inv_factor(part, D0, dp_max=cfg.dp_max, budget=cfg.budget,
                                               deadline=dl)
        except IncompleteSplit as exc:
            out += exc.found
        except (Exhausted, NotDivisible):
            pass
    return out


def _complete_from_exponential(out: MethodOutcome, D0, cfg, dl, timed) -> MethodOutcome:
    """If ``exp(A/B)*S`` is a first integral for the exponential factor R, then
    R/(exp(A/B)*S) is algebraic; the numerator of S brings its missing factors."""
    from .liouville import exponential_first_integral, solve_exponents, verify_if

    R = out.integrating_factor
    if R.is_algebraic():
        return out
    S = timed("IF", exponential_first_integral, R, D0)
    if S is None:
        return out
    pool = irreducible_dps(out.dps + out.other_dps + _split_into_dps([S.num], D0, cfg, dl), D0)
    try:
        R2 = timed("IF", solve_exponents, pool, D0)
    except NoAlgebraicIF:
        return out
    if not verify_if(R2, D0):
        return out
    out.diagnostics.append(f"dg={out.dg_used}: exp({R.exp_part})*({S}) is a first integral; "
                           f"algebraic factor {R2}")
    return _outcome(out.method, pool, out.dg_used, out.associated, R2, out.stats, out.diagnostics)


def _complete_from_rational_fi(out: MethodOutcome, D0, cfg, dl, timed) -> MethodOutcome:
    """A rational first integral P/Q makes every member of the pencil of P and Q a
    Darboux polynomial.  When one irreducible factor of P or Q alone gives an
    integrating factor, that curve is reported and the rest move to other_dps."""
    from .liouville import first_integral, solve_exponents, verify_if

    R = out.integrating_factor
    if not R.is_algebraic() or len(R.factors) < 2 or not R.has_integer_exponents():
        return out
    try:
        I = first_integral(R, D0)
    except QuadratureNotClosed:
        return out
    F = I.rational_part
    if I.log_terms or (F.num.is_constant() and F.den.is_constant()):
        return out
    pool = irreducible_dps(out.dps + _split_into_dps([F.num, F.den], D0, cfg, dl), D0)
    try:
        R2 = timed("IF", solve_exponents, pool, D0)
    except NoAlgebraicIF:
        return out
    if len(R2.factors) == 1 and R2.has_integer_exponents() and verify_if(R2, D0):
        p = R2.factors[0][0]
        return MethodOutcome(out.method, [d for d in pool if d.p == p], out.dg_used, out.associated,
                             R2, out.stats, out.diagnostics, [d for d in pool if d.p != p])
    return out


def _sparser(R, old) -> bool:
    return R.is_algebraic() and not old.is_algebraic()


def _wants_lookahead(out: "MethodOutcome", D0: VectorField) -> bool:
    """An exponential factor may have an algebraic alternative at a higher dg."""
    return not out.integrating_factor.is_algebraic()


def _dg_step(D0, cfg, method, dg, q0_monos, dl, timed, diags):
    """Darboux polynomials found at one candidate degree, or None."""
    from .liouville import find_integrating_factor

    dl.check(method)
    e1 = timed("E1", stage_E1, D0, dg, dl)
    if e1.is_trivial():
        diags.append(f"dg={dg}: E1 admits only the zero inverse factor")
        return None
    try:
        if method == "singer":
            sols = timed("E2", stage_E2_singer, e1, cfg.budget, dl)
        elif method == "colin":
            sols = timed("E2", stage_E2_colin, e1, cfg.budget, dl)
        else:
            sols = timed("E2", stage_E2_impa, e1, D0, cfg.budget, dl, q0_monos)
    except NoAssociatedField as exc:
        diags.append(f"dg={dg}: {exc}")
        dl.check(method)
        return None
    # every Darboux polynomial found at this dg counts, whichever solution produced it
    found: Dict[BivarPoly, DarbouxPair] = {}
    first = None
    for sol in sols:
        try:
            if method == "colin":
                # Darboux factors of an integrating factor divide I; one extra degree
                # reaches pencil members when a rational first integral exists
                kmax = cfg.colin_dp_max or min(cfg.dp_max, sol.inv_factor.degree() + 1)
                dps = timed("E3E4", colin_dps, D0, sol, kmax, cfg.budget, dl)
            else:
                dps = timed("split", extract_dps_from_inv_factor, sol.inv_factor, D0,
                            sol.cofactor_of_inv, cfg.dp_max, cfg.budget, dl)
        except IncompleteSplit as exc:
            diags.append(f"dg={dg}: {exc}")
            dps = exc.found
        except (NotDivisible, DegenerateFieldPair) as exc:
            diags.append(f"dg={dg}: {exc}")
            continue
        if dps and first is None:
            first = sol
        for d in dps:
            old = found.get(d.p)
            if old is None or d.multiplicity > old.multiplicity:
                found[d.p] = d
        if method == "colin" and found:
            # E3/E4 is costly; stop at the first solution that yields a factor
            R = timed("IF", find_integrating_factor, list(found.values()), D0)
            if R is not None:
                break
    return (found, first) if found else None


def run_auto(D0: VectorField, cfg: Optional[SearchConfig] = None,
             deadline: Optional[Deadline] = None) -> MethodOutcome:
    """Try ImpA, SInGeR, CoLin and MUC in turn until one yields an integrating factor.

    With a time limit, each method may use at most a fixed share of what is left
    so that a slow early method cannot starve the later ones.
    """
    from dataclasses import replace

    cfg = cfg or SearchConfig()
    dl = deadline or Deadline(cfg.time_limit)
    shares = (0.4, 0.5, 0.6, 1.0)
    diags: List[str] = []
    for method, share in zip(AUTO_ORDER, shares):
        left = dl.remaining()
        if left is not None and left <= 0:
            break
        try:
            out = run_method(D0, replace(cfg, method=method), dl.sub(None if left is None else left * share))
        except MethodFailed as exc:
            diags.append(f"{method}: {exc}")
            continue
        out.diagnostics = diags + out.diagnostics
        return out
    raise MethodFailed("auto: every method failed", diags)



def check_outcome(D0: VectorField, out: MethodOutcome) -> List[Tuple[str, bool]]:
    """Re-run the exact identities that every method outcome must satisfy."""
    from .liouville import verify_if

    D0 = _as_field(D0)
    checks = [(f"darboux pair {d.p}", d.check(D0)) for d in out.dps]
    R = out.integrating_factor
    if R is not None:
        checks.append(("integrating factor", verify_if(R, D0)))
    sol = out.associated
    if sol is not None:
        D1, inv = sol.d1, sol.inv_factor
        T0 = divergence_T(D0)
        checks.append(("E1: delta = I*T0", delta(D0, D1) == inv * T0))
        if sol.provenance in ("singer", "colin"):
            checks.append(("D1(I) = I*T1", apply(D1, inv) == inv * divergence_T(D1)))
        if sol.cofactor_of_inv is not None:
            checks.append(("D0(I) = Q0*I", apply(D0, inv) == sol.cofactor_of_inv * inv))
        try:
            F0, F1 = commutator_coeffs(D0, D1)
        except DegenerateFieldPair:
            checks.append(("commutator", False))
        else:
            for comp in ("N", "M"):
                lhs = RatFunc(apply(D0, getattr(D1, comp)) - apply(D1, getattr(D0, comp)))
                rhs = F0 * RatFunc(getattr(D0, comp)) + F1 * RatFunc(getattr(D1, comp))
                checks.append((f"commutator on {comp}", lhs == rhs))
        if R is not None and sol.provenance in ("singer", "colin"):
            # factors of a Darboux polynomial of D1 are Darboux polynomials of D1
            for p, _ in R.factors:
                if try_exact_div(inv, p) is not None:
                    checks.append((f"{p} is a Darboux polynomial of D1",
                                   try_exact_div(apply(D1, p), p) is not None))
    return checks
