"""Bounded solver for polynomial systems in parameter symbols.

The search works on branches.  Each branch holds the residual equations,
the assignment made so far and the nonzero side conditions recorded when
splitting.  A branch is simplified by propagation (single-term equations,
linear extraction, affine elimination), split on monomial factors, and
handed to a Groebner basis computation when nothing else applies.  Only
rational solutions are produced; families are affine assignments whose
values may mention free symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

from gmpy2 import mpq

from .ansatz import (Assignment, ParamExpr, PolySystem, RawExpr, pm_order_key, raw_degree,
                     raw_symbols, subs_raw, symbol)
from .deadline import NEVER, Deadline
from .errors import DeadlineExceeded, Exhausted, Inconsistent
from .groebner import groebner, is_zero_dimensional, leading_exp, minimal_polynomial
from .linsolve import solve_linear


@dataclass(frozen=True)
class SolveBudget:
    max_case_splits: int = 64
    max_groebner_spolys: int = 20000
    time_limit_ms: int = 30000

    def __post_init__(self):
        if self.max_case_splits <= 0 or self.max_groebner_spolys <= 0 or self.time_limit_ms <= 0:
            raise ValueError("budget fields must be positive")


@dataclass
class SolutionFamily:
    assignment: Assignment
    constraints: List[ParamExpr] = field(default_factory=list)
    free_symbols: FrozenSet = field(default_factory=frozenset)

    def key(self):
        return self.assignment.canonical_key()

    def value(self, sid: int) -> ParamExpr:
        v = self.assignment.get(sid)
        return v if v is not None else ParamExpr.sym(sid)

    def __str__(self):
        s = str(self.assignment)
        if self.constraints:
            s += " where " + ", ".join(f"{c} != 0" for c in self.constraints)
        return s


@dataclass
class SolveStats:
    branches: int = 0
    splits: int = 0
    spolys: int = 0
    groebner_calls: int = 0
    dead: int = 0
    unrepresentable: int = 0
    irrational_dropped: int = 0
    blocks: int = 0


@dataclass
class SolveReport:
    families: List[SolutionFamily]
    complete: bool
    stats: SolveStats
    reason: str = ""


class _Branch:
    __slots__ = ("eqs", "values", "constraints", "depth", "gb_done")

    def __init__(self, eqs, values, constraints, depth=0):
        self.eqs: List[RawExpr] = eqs
        self.values: Dict[int, RawExpr] = values
        self.constraints: List[RawExpr] = constraints
        self.depth = depth
        self.gb_done = False

    def child(self):
        # equation dicts are never mutated in place, so children share them
        b = _Branch(list(self.eqs), dict(self.values), list(self.constraints), self.depth + 1)
        return b

    def assign(self, new: Dict[int, RawExpr]) -> None:
        """Record ``new`` (values free of assigned symbols and of each other's keys)."""
        if not new:
            return
        for s, v in list(self.values.items()):
            if raw_symbols(v) & new.keys():
                self.values[s] = subs_raw(v, new)
        self.values.update(new)
        self.eqs = [subs_raw(e, new) if raw_symbols(e) & new.keys() else e for e in self.eqs]
        self.constraints = [subs_raw(c, new) if raw_symbols(c) & new.keys() else c
                            for c in self.constraints]


class _Dead(Exception):
    pass


def _normalize(e: RawExpr) -> RawExpr:
    return ParamExpr._raw(e).normalized().terms


def _sort_key(e: RawExpr):
    return (raw_degree(e), len(e), sorted((pm_order_key(k), c) for k, c in e.items()))


def solve_poly_system(system: PolySystem, budget: Optional[SolveBudget] = None, *,
                      nontrivial: Optional[Iterable] = None,
                      projective: Sequence[Sequence] = (),
                      deadline: Optional[Deadline] = None) -> List[SolutionFamily]:
    """All rational solution families found within ``budget``.

    Raises :class:`Exhausted` (with the families found so far in
    ``.partial``) when some branch could not be finished.
    """
    rep = solve_poly_system_report(system, budget, nontrivial=nontrivial, projective=projective,
                                   deadline=deadline)
    if not rep.complete:
        exc = Exhausted(rep.reason or "solve budget exhausted")
        exc.partial = rep.families
        exc.stats = rep.stats
        raise exc
    return rep.families


def solve_poly_system_report(system: PolySystem, budget: Optional[SolveBudget] = None, *,
                             nontrivial: Optional[Iterable] = None,
                             projective: Sequence[Sequence] = (),
                             deadline: Optional[Deadline] = None) -> SolveReport:
    budget = budget or SolveBudget()
    dl = (deadline or NEVER).sub(budget.time_limit_ms / 1000.0)
    solver = _Solver(system, budget, nontrivial, projective, dl)
    return solver.run()


class _Solver:
    def __init__(self, system: PolySystem, budget: SolveBudget, nontrivial, projective, deadline):
        self.system = system
        self.unknowns = frozenset(system.unknowns)
        self.budget = budget
        self.nontrivial = None if nontrivial is None else frozenset(
            s.id if hasattr(s, "id") else int(s) for s in nontrivial)
        self.projective = [[s.id if hasattr(s, "id") else int(s) for s in g] for g in projective]
        self.deadline = deadline
        self.stats = SolveStats()
        self.families: Dict[tuple, SolutionFamily] = {}
        # id -> (object, normalized, frozen items, sort key); the object keeps the id alive
        self._norm_cache: Dict[int, tuple] = {}
        self.complete = True
        self.reason = ""

    # -- driver -------------------------------------------------------------
    def run(self) -> SolveReport:
        root = _Branch([dict(e.terms) for e in self.system.equations], {}, [])
        stack = self._dehomogenize(root)
        stack.reverse()
        try:
            while stack:
                self.deadline.check("solve_poly_system")
                b = stack.pop()
                self.stats.branches += 1
                try:
                    children = self._process(b)
                except _Dead:
                    self.stats.dead += 1
                    continue
                except _Unrepresentable as exc:
                    self.stats.unrepresentable += 1
                    self.complete = False
                    self.reason = str(exc)
                    continue
                if children is None:
                    self._emit(b)
                else:
                    if len(children) > 1:
                        self.stats.splits += 1
                        if self.stats.splits > self.budget.max_case_splits:
                            raise Exhausted(f"more than {self.budget.max_case_splits} case splits")
                    stack.extend(reversed(children))
        except DeadlineExceeded as exc:
            self.complete = False
            self.reason = str(exc)
        except Exhausted as exc:
            self.complete = False
            self.reason = str(exc)
        fams = sorted(self.families.values(), key=lambda f: repr(f.key()))
        return SolveReport(fams, self.complete, self.stats, self.reason)

    def _dehomogenize(self, root: _Branch) -> List[_Branch]:
        branches = [root]
        for group in self.projective:
            gs = [s for s in group if s in self.unknowns]
            if not gs or not _homogeneous_in(root.eqs, set(gs)):
                continue
            nxt = []
            for b in branches:
                for i, s in enumerate(gs):
                    c = b.child()
                    new = {t: {} for t in gs[:i]}
                    new[s] = {(): mpq(1)}
                    c.assign(new)
                    nxt.append(c)
                if self.nontrivial is None or not set(gs) <= self.nontrivial:
                    c = b.child()
                    c.assign({t: {} for t in gs})
                    nxt.append(c)
            branches = nxt
        return branches

    def _emit(self, b: _Branch) -> None:
        a = Assignment()
        a.values = {s: v for s, v in b.values.items()}
        fam = SolutionFamily(
            assignment=a,
            constraints=[ParamExpr._raw(c) for c in b.constraints],
            free_symbols=frozenset(symbol(s) for s in self.unknowns if s not in b.values),
        )
        k = fam.key()
        if k not in self.families:
            self.families[k] = fam

    # -- one branch ---------------------------------------------------------
    def _process(self, b: _Branch):
        """Simplify ``b``; return None when solved, or a list of child branches."""
        while True:
            self._clean(b)
            if not b.eqs:
                return None
            if self._propagate(b):
                continue
            if not b.gb_done:
                children = self._subsystem(b)
                if children is not None:
                    return children
                self._groebner(b)
                continue
            children = self._split(b)
            if children is not None:
                return children
            return self._extract(b)

    def _clean(self, b: _Branch) -> None:
        seen = set()
        eqs = []
        cache = self._norm_cache
        for e in b.eqs:
            if not e:
                continue
            if len(e) == 1 and () in e:
                raise _Dead()
            hit = cache.get(id(e))
            if hit is not None and hit[0] is e:
                e, fk, sk = hit[1], hit[2], hit[3]
            else:
                orig = e
                e = _normalize(e)
                fk = frozenset(e.items())
                sk = _sort_key(e)
                cache[id(orig)] = (orig, e, fk, sk)
                cache[id(e)] = (e, e, fk, sk)
            if fk in seen:
                continue
            seen.add(fk)
            eqs.append((sk, e))
        eqs.sort(key=lambda t: t[0])
        eqs = [e for _, e in eqs]
        b.eqs = eqs
        cons = []
        cseen = set()
        for c in b.constraints:
            if not c:
                raise _Dead()
            if all(not k for k in c):
                continue
            c = _normalize(c)
            k = frozenset(c.items())
            if k not in cseen:
                cseen.add(k)
                cons.append(c)
        b.constraints = cons
        if self.nontrivial:
            if all(s in b.values and not b.values[s] for s in self.nontrivial):
                raise _Dead()

    def _propagate(self, b: _Branch) -> bool:
        # single-term equations in one symbol
        zero = {}
        for e in b.eqs:
            if len(e) == 1:
                (k,) = e
                if len(set(k)) == 1:
                    zero[k[0]] = {}
        if zero:
            b.assign(zero)
            return True
        lin = [e for e in b.eqs if raw_degree(e) <= 1]
        if lin:
            try:
                rep = solve_linear(PolySystem([ParamExpr._raw(e) for e in lin]), self.deadline)
            except Inconsistent:
                raise _Dead()
            b.assign(rep.solution.values)
            b.gb_done = False
            return True
        best = None
        for idx, e in enumerate(b.eqs):
            for k, c in e.items():
                if len(k) != 1:
                    continue
                u = k[0]
                if any(u in kk for kk in e if kk != k):
                    continue
                # only affine values: substituting nonlinear ones compounds degrees
                if any(len(kk) > 1 for kk in e):
                    continue
                cand = (len(e), raw_degree(e), u, idx)
                if best is None or cand < best:
                    best = cand
        if best is not None and best[0] <= 64:
            _, _, u, idx = best
            e = b.eqs[idx]
            c = e[(u,)]
            val = {k: -v / c for k, v in e.items() if k != (u,)}
            b.assign({u: val})
            b.gb_done = False
            return True
        return False

    def _split(self, b: _Branch):
        for e in b.eqs:
            common = None
            for k in e:
                ks = set(k)
                common = ks if common is None else common & ks
                if not common:
                    break
            if not common:
                continue
            syms = sorted(common)
            children = []
            for i, s in enumerate(syms):
                c = b.child()
                c.constraints.extend({(t,): mpq(1)} for t in syms[:i])
                c.assign({s: {}})
                children.append(c)
            # all common symbols nonzero: divide them out once
            c = b.child()
            c.constraints.extend({(t,): mpq(1)} for t in syms)
            rest = {}
            for k, v in e.items():
                kk = list(k)
                for t in syms:
                    kk.remove(t)
                rest[tuple(kk)] = v
            c.eqs = [rest if ee is e else ee for ee in c.eqs]
            children.append(c)
            return children
        return None

    def _groebner(self, b: _Branch) -> None:
        syms = sorted(set().union(*(raw_symbols(e) for e in b.eqs)))
        index = {s: i for i, s in enumerate(syms)}
        n = len(syms)
        polys = []
        for e in b.eqs:
            p = {}
            for k, c in e.items():
                ex = [0] * n
                for s in k:
                    ex[index[s]] += 1
                p[tuple(ex)] = c
            polys.append(p)
        remaining = self.budget.max_groebner_spolys - self.stats.spolys
        if remaining <= 0:
            raise Exhausted("S-polynomial budget exhausted")
        self.stats.groebner_calls += 1
        counter = [0]
        try:
            gb = groebner(polys, n, max_spolys=remaining, deadline=self.deadline, counter=counter)
        finally:
            self.stats.spolys += counter[0]
        b.eqs = [_from_gpoly(g, syms) for g in gb]
        b.gb_done = True
        if len(gb) == 1 and len(gb[0]) == 1 and not any(next(iter(gb[0]))):
            raise _Dead()

    def _extract(self, b: _Branch):
        syms = sorted(set().union(*(raw_symbols(e) for e in b.eqs)))
        # the branch equations are stored with integer content; reduction needs monic divisors
        gb = [_monic(p) for p in _to_gpolys(b.eqs, syms)]
        if not is_zero_dimensional(gb, len(syms)):
            raise _Unrepresentable("positive-dimensional component without affine parametrization")
        return self._root_branches(b, gb, syms)

    def _root_branches(self, b: _Branch, gb, syms):
        """Children assigning each rational root of the best minimal polynomial."""
        n = len(syms)
        best = None
        for i in range(n):
            mp = minimal_polynomial(i, gb, n, deadline=self.deadline)
            if mp is None:
                continue
            roots, split = _roots_info(mp)
            if best is None or len(roots) < len(best[1]) or (len(roots) == len(best[1]) and len(mp) < len(best[2])):
                best = (i, roots, mp, split)
            if len(mp) == 2:
                break
        if best is None:
            raise _Unrepresentable("minimal polynomial degree bound exceeded")
        i, roots, mp, split = best
        if not split:
            self.stats.irrational_dropped += 1
        if not roots:
            raise _Dead()
        children = []
        for r in roots:
            c = b.child()
            c.assign({syms[i]: {(): r} if r else {}})
            children.append(c)
        return children

    def _subsystem(self, b: _Branch):
        """Solve a small closed block of equations first.

        Variables are added greedily so that as many equations as possible
        lie entirely inside the chosen set; once the enclosed equations are
        zero-dimensional in it, branch on the roots of one of its variables.
        Returns None when no such block is found.
        """
        evars = [frozenset(raw_symbols(e)) for e in b.eqs]
        allv = frozenset().union(*evars)
        if len(allv) <= _BLOCK_MIN:
            return None
        order = sorted(range(len(b.eqs)), key=lambda i: (len(evars[i]), i))
        S = set(evars[order[0]])
        tried = set()
        while len(S) <= _BLOCK_MAX and len(S) < len(allv):
            inside = [i for i in range(len(b.eqs)) if evars[i] <= S]
            key = frozenset(S)
            if len(inside) >= len(S) and key not in tried:
                tried.add(key)
                syms = sorted(S)
                polys = _to_gpolys([b.eqs[i] for i in inside], syms)
                remaining = self.budget.max_groebner_spolys - self.stats.spolys
                if remaining <= 0:
                    raise Exhausted("S-polynomial budget exhausted")
                counter = [0]
                try:
                    gb = groebner(polys, len(syms), max_spolys=remaining, deadline=self.deadline,
                                  counter=counter)
                finally:
                    self.stats.spolys += counter[0]
                if len(gb) == 1 and len(gb[0]) == 1 and not any(next(iter(gb[0]))):
                    raise _Dead()
                if is_zero_dimensional(gb, len(syms)):
                    self.stats.blocks += 1
                    return self._root_branches(b, gb, syms)
            # grow: the variable closing the most equations, then the most frequent one
            best = None
            for v in allv - S:
                T = S | {v}
                closed = sum(1 for ev in evars if v in ev and ev <= T)
                freq = sum(1 for ev in evars if v in ev)
                cand = (-closed, -freq, v)
                if best is None or cand < best:
                    best = cand
            S.add(best[2])
        return None


def _to_gpolys(eqs, syms):
    index = {s: i for i, s in enumerate(syms)}
    n = len(syms)
    out = []
    for e in eqs:
        p = {}
        for k, c in e.items():
            ex = [0] * n
            for s in k:
                ex[index[s]] += 1
            p[tuple(ex)] = c
        out.append(p)
    return out


_BLOCK_MIN = 8    # below this many unknowns a full Groebner basis is cheap anyway
_BLOCK_MAX = 24


class _Unrepresentable(Exception):
    pass


def _from_gpoly(g, syms) -> RawExpr:
    out = {}
    for ex, c in g.items():
        k = []
        for i, m in enumerate(ex):
            if m:
                k.extend([syms[i]] * m)
        out[tuple(k)] = c
    return out


def _homogeneous_in(eqs: List[RawExpr], group: set) -> bool:
    for e in eqs:
        degs = {sum(1 for s in k if s in group) for k in e}
        if len(degs) != 1 or 0 in degs:
            return False
    return True


def _monic(p):
    lc = p[leading_exp(p)]
    return p if lc == 1 else {e: c / lc for e, c in p.items()}


def rational_roots(coeffs: Sequence) -> List["mpq"]:
    """Distinct rational roots of a univariate polynomial (coefficients low to high)."""
    return _roots_info(coeffs)[0]


def _roots_info(coeffs: Sequence):
    """Distinct rational roots and whether the polynomial splits over QQ."""
    import sympy

    t = sympy.Symbol("t")
    expr = sum(sympy.Rational(int(c.numerator), int(c.denominator)) * t ** i
               for i, c in enumerate(coeffs) if c)
    poly = sympy.Poly(expr, t, domain="QQ")
    roots = set()
    split = True
    for fac, _ in poly.factor_list()[1]:
        if fac.degree() == 1:
            a, b = fac.all_coeffs()
            r = -sympy.Rational(b) / sympy.Rational(a)
            roots.add(mpq(int(r.p), int(r.q)))
        elif fac.degree() > 1:
            split = False
    return sorted(roots), split


def check_family(system: PolySystem, fam: SolutionFamily) -> bool:
    """Every equation vanishes identically under the family's assignment."""
    return all(not subs_raw(e.terms, fam.assignment.values) for e in system.equations)
