"""Candidate polynomials with undetermined coefficients.

A :class:`ParamExpr` is a polynomial over parameter symbols; a parameter
monomial is a sorted tuple of symbol ids with repetition, so ``(3, 3, 7)``
stands for ``s3^2 * s7`` and ``()`` for the constant term.  A
:class:`ParamPoly` maps ``(x, y)`` monomials to ParamExprs.
"""

from __future__ import annotations

import functools
import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd as igcd, lcm as ilcm
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from gmpy2 import mpq

from .poly import BivarPoly, Monomial, Q, Rational, grlex_key

PMono = Tuple[int, ...]
RawExpr = Dict[PMono, "mpq"]

_Q0 = mpq(0)
_Q1 = mpq(1)


# -- symbols ---------------------------------------------------------------------

class _SymbolSource:
    def __init__(self):
        self._ids = itertools.count(1)
        self._lock = threading.Lock()
        self.names: Dict[int, str] = {}

    def fresh(self, name: str) -> int:
        with self._lock:
            sid = next(self._ids)
            self.names[sid] = name
        return sid


_SOURCE = _SymbolSource()


@dataclass(frozen=True, order=True)
class ParamSymbol:
    id: int
    name: str

    def __str__(self):
        return self.name


def fresh_symbol(name: str) -> ParamSymbol:
    return ParamSymbol(_SOURCE.fresh(name), name)


def symbol_name(sid: int) -> str:
    return _SOURCE.names.get(sid, f"s{sid}")


def symbol(sid: int) -> ParamSymbol:
    return ParamSymbol(sid, symbol_name(sid))


# -- raw expression helpers ------------------------------------------------------

_merge_cache: Dict[Tuple[PMono, PMono], PMono] = {}


def pm_mul(a: PMono, b: PMono) -> PMono:
    if not a:
        return b
    if not b:
        return a
    key = (a, b)
    r = _merge_cache.get(key)
    if r is None:
        r = tuple(sorted(a + b))
        if len(_merge_cache) < 1_000_000:
            _merge_cache[key] = r
    return r


def raw_add_into(out: RawExpr, e: RawExpr, scale=None) -> None:
    for k, c in e.items():
        if scale is not None:
            c = c * scale
        v = out.get(k)
        if v is None:
            out[k] = c
        else:
            v = v + c
            if v:
                out[k] = v
            else:
                del out[k]


def raw_mul(a: RawExpr, b: RawExpr) -> RawExpr:
    out: RawExpr = {}
    get = out.get
    for k1, c1 in a.items():
        for k2, c2 in b.items():
            k = pm_mul(k1, k2)
            out[k] = get(k, _Q0) + c1 * c2
    return {k: c for k, c in out.items() if c}


def raw_degree(e: RawExpr) -> int:
    return max((len(k) for k in e), default=-1)


def raw_symbols(e: RawExpr) -> set:
    s = set()
    for k in e:
        s.update(k)
    return s


# -- ParamExpr --------------------------------------------------------------------

class ParamExpr:
    """Polynomial in parameter symbols with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[PMono, object]] = None):
        self.terms: RawExpr = {}
        if terms:
            for k, c in terms.items():
                c = Q(c)
                if c:
                    self.terms[tuple(sorted(k))] = c

    @classmethod
    def _raw(cls, terms: RawExpr) -> "ParamExpr":
        e = object.__new__(cls)
        e.terms = terms
        return e

    @classmethod
    def const(cls, c) -> "ParamExpr":
        c = Q(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def sym(cls, s, c=1) -> "ParamExpr":
        sid = s.id if isinstance(s, ParamSymbol) else int(s)
        return cls._raw({(sid,): Q(c)})

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def degree(self) -> int:
        return raw_degree(self.terms)

    def symbols(self) -> set:
        return raw_symbols(self.terms)

    def is_constant(self) -> bool:
        return all(not k for k in self.terms)

    def constant(self) -> "mpq":
        return self.terms.get((), _Q0)

    def __eq__(self, other):
        if isinstance(other, ParamExpr):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, Rational)):
            return self.terms == ParamExpr.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @staticmethod
    def _co(o):
        if isinstance(o, ParamExpr):
            return o
        if isinstance(o, (int, Fraction, Rational)):
            return ParamExpr.const(o)
        if isinstance(o, ParamSymbol):
            return ParamExpr.sym(o)
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        raw_add_into(out, o.terms)
        return ParamExpr._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return ParamExpr._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        raw_add_into(out, o.terms, -1)
        return ParamExpr._raw(out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Rational)):
            c = Q(other)
            if not c:
                return ParamExpr._raw({})
            return ParamExpr._raw({k: v * c for k, v in self.terms.items()})
        o = self._co(other)
        if o is None:
            return NotImplemented
        return ParamExpr._raw(raw_mul(self.terms, o.terms))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = ParamExpr.const(1)
        for _ in range(n):
            out = out * self
        return out

    def subs(self, assignment: "Assignment") -> "ParamExpr":
        return ParamExpr._raw(subs_raw(self.terms, assignment.values))

    def evaluate(self, values: Mapping[int, object]) -> "mpq":
        total = _Q0
        for k, c in self.terms.items():
            t = c
            for s in k:
                t = t * Q(values[s])
            total += t
        return total

    def linear_part(self) -> Dict[int, "mpq"]:
        """Coefficients of degree-one terms, keyed by symbol id."""
        return {k[0]: c for k, c in self.terms.items() if len(k) == 1}

    def normalized(self) -> "ParamExpr":
        """Scale to coprime integers with positive leading coefficient."""
        if not self.terms:
            return self
        num = reduce(igcd, (int(c.numerator) for c in self.terms.values()), 0)
        den = reduce(ilcm, (int(c.denominator) for c in self.terms.values()), 1)
        lead = max(self.terms, key=pm_order_key)
        f = mpq(den, num)
        if self.terms[lead] < 0:
            f = -f
        if f == 1:
            return self
        return ParamExpr._raw({k: c * f for k, c in self.terms.items()})

    def __str__(self):
        return format_expr(self.terms)

    def __repr__(self):
        return f"ParamExpr({format_expr(self.terms)!r})"


@functools.lru_cache(maxsize=None)
def pm_order_key(k: PMono):
    """Graded order on parameter monomials: degree first, then lower ids first."""
    return (len(k), tuple(-s for s in k))


def format_pmono(k: PMono) -> str:
    parts = []
    for s, grp in itertools.groupby(k):
        n = len(list(grp))
        nm = symbol_name(s)
        parts.append(nm if n == 1 else f"{nm}^{n}")
    return "*".join(parts)


def format_expr(e: RawExpr) -> str:
    if not e:
        return "0"
    out = []
    for k in sorted(e, key=pm_order_key, reverse=True):
        c = e[k]
        neg = c < 0
        a = -c if neg else c
        m = format_pmono(k)
        if not m:
            body = str(a)
        elif a == 1:
            body = m
        else:
            body = f"{a}*{m}"
        out.append(("-" if neg else ("+" if out else "")) + body)
    return "".join(out)


# -- Assignment -------------------------------------------------------------------

class Assignment:
    """Map symbol id -> ParamExpr over unassigned symbols (kept fully substituted)."""

    __slots__ = ("values",)

    def __init__(self, values: Optional[Mapping] = None):
        self.values: Dict[int, RawExpr] = {}
        if values:
            for s, v in values.items():
                sid = s.id if isinstance(s, ParamSymbol) else int(s)
                if isinstance(v, ParamExpr):
                    v = v.terms
                elif isinstance(v, ParamSymbol):
                    v = {(v.id,): _Q1}
                elif isinstance(v, dict):
                    pass
                else:
                    c = Q(v)
                    v = {(): c} if c else {}
                self.values[sid] = dict(v)
            self._close()

    def _close(self):
        # iterate substitution until no assigned symbol appears in any value
        for _ in range(len(self.values) + 1):
            changed = False
            for s, v in list(self.values.items()):
                if raw_symbols(v) & self.values.keys():
                    nv = subs_raw(v, self.values)
                    if s in raw_symbols(nv):
                        raise ValueError(f"cyclic assignment for {symbol_name(s)}")
                    self.values[s] = nv
                    changed = True
            if not changed:
                return
        raise ValueError("assignment did not converge (cyclic)")

    def copy(self) -> "Assignment":
        a = Assignment()
        a.values = {s: dict(v) for s, v in self.values.items()}
        return a

    def __contains__(self, s):
        return (s.id if isinstance(s, ParamSymbol) else s) in self.values

    def __len__(self):
        return len(self.values)

    def __getitem__(self, s) -> ParamExpr:
        sid = s.id if isinstance(s, ParamSymbol) else s
        return ParamExpr._raw(dict(self.values[sid]))

    def get(self, s, default=None):
        sid = s.id if isinstance(s, ParamSymbol) else s
        v = self.values.get(sid)
        return default if v is None else ParamExpr._raw(dict(v))

    def keys(self):
        return self.values.keys()

    def extend(self, sid: int, value: RawExpr) -> "Assignment":
        """New assignment with ``sid := value`` composed into the existing values."""
        value = subs_raw(value, self.values)
        if sid in raw_symbols(value):
            raise ValueError("cyclic extension")
        single = {sid: value}
        out = Assignment()
        out.values = {s: (subs_raw(v, single) if sid in raw_symbols(v) else dict(v))
                      for s, v in self.values.items()}
        out.values[sid] = value
        return out

    def compose(self, other: "Assignment") -> "Assignment":
        out = self.copy()
        for s, v in other.values.items():
            out = out.extend(s, v)
        return out

    def canonical_key(self):
        return tuple(sorted((s, tuple(sorted(v.items(), key=lambda kv: kv[0])))
                            for s, v in self.values.items()))

    def __eq__(self, other):
        return isinstance(other, Assignment) and self.values == other.values

    def __str__(self):
        items = sorted(self.values.items())
        return "{" + ", ".join(f"{symbol_name(s)}={format_expr(v)}" for s, v in items) + "}"

    __repr__ = __str__


def subs_raw(e: RawExpr, values: Mapping[int, RawExpr]) -> RawExpr:
    if not values:
        return dict(e)
    out: RawExpr = {}
    for k, c in e.items():
        if not any(s in values for s in k):
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
            continue
        term: RawExpr = {(): c}
        rest = []
        for s in k:
            val = values.get(s)
            if val is None:
                rest.append(s)
            else:
                term = raw_mul(term, val)
                if not term:
                    break
        if not term:
            continue
        if rest:
            rt = tuple(rest)
            term = {pm_mul(kk, rt): cc for kk, cc in term.items()}
        raw_add_into(out, term)
    return out


# -- ParamPoly --------------------------------------------------------------------

class ParamPoly:
    """Bivariate polynomial whose coefficients are ParamExprs."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, object]] = None):
        self.terms: Dict[Monomial, RawExpr] = {}
        if terms:
            for m, e in terms.items():
                if isinstance(e, ParamExpr):
                    e = dict(e.terms)
                elif isinstance(e, ParamSymbol):
                    e = {(e.id,): _Q1}
                elif not isinstance(e, dict):
                    c = Q(e)
                    e = {(): c} if c else {}
                if e:
                    self.terms[m] = e

    @classmethod
    def _raw(cls, terms: Dict[Monomial, RawExpr]) -> "ParamPoly":
        p = object.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def from_poly(cls, p: BivarPoly) -> "ParamPoly":
        return cls._raw({m: {(): c} for m, c in p.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, ex: int, ey: int) -> ParamExpr:
        return ParamExpr._raw(dict(self.terms.get((ex, ey), {})))

    def symbols(self) -> set:
        s = set()
        for e in self.terms.values():
            s |= raw_symbols(e)
        return s

    def param_degree(self) -> int:
        return max((raw_degree(e) for e in self.terms.values()), default=-1)

    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def to_poly(self) -> BivarPoly:
        out = {}
        for m, e in self.terms.items():
            for k, c in e.items():
                if k:
                    raise ValueError("ParamPoly still mentions parameters")
                out[m] = c
        return BivarPoly._raw(out)

    def __eq__(self, other):
        if isinstance(other, BivarPoly):
            other = ParamPoly.from_poly(other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return self.terms == other.terms

    @staticmethod
    def _co(o):
        if isinstance(o, ParamPoly):
            return o
        if isinstance(o, BivarPoly):
            return ParamPoly.from_poly(o)
        if isinstance(o, (int, Fraction, Rational)):
            return ParamPoly.from_poly(BivarPoly.const(o))
        if isinstance(o, ParamExpr):
            return ParamPoly._raw({(0, 0): dict(o.terms)} if o.terms else {})
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        out = {m: dict(e) for m, e in self.terms.items()}
        for m, e in o.terms.items():
            cur = out.get(m)
            if cur is None:
                out[m] = dict(e)
            else:
                raw_add_into(cur, e)
                if not cur:
                    del out[m]
        return ParamPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly._raw({m: {k: -c for k, c in e.items()} for m, e in self.terms.items()})

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Rational)):
            c = Q(other)
            if not c:
                return ParamPoly._raw({})
            return ParamPoly._raw({m: {k: v * c for k, v in e.items()} for m, e in self.terms.items()})
        if isinstance(other, BivarPoly):
            return _mul_numeric(self, other)
        if isinstance(other, ParamExpr):
            return ParamPoly._raw({m: r for m, e in self.terms.items()
                                   if (r := raw_mul(e, other.terms))})
        o = self._co(other)
        if o is None:
            return NotImplemented
        return _mul_param(self, o)

    __rmul__ = __mul__

    def diff(self, var: str) -> "ParamPoly":
        out = {}
        if var == "x":
            for (i, j), e in self.terms.items():
                if i:
                    out[(i - 1, j)] = {k: c * i for k, c in e.items()}
        elif var == "y":
            for (i, j), e in self.terms.items():
                if j:
                    out[(i, j - 1)] = {k: c * j for k, c in e.items()}
        else:
            raise ValueError(var)
        return ParamPoly._raw(out)

    def subs(self, assignment: "Assignment") -> "ParamPoly":
        return substitute(self, assignment)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=grlex_key, reverse=True):
            mono = "*".join(p for p in (("x" if m[0] == 1 else f"x^{m[0]}") if m[0] else "",
                                        ("y" if m[1] == 1 else f"y^{m[1]}") if m[1] else "") if p)
            coef = format_expr(self.terms[m])
            parts.append(f"({coef})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    __repr__ = __str__


def _mul_numeric(a: ParamPoly, b: BivarPoly) -> ParamPoly:
    out: Dict[Monomial, RawExpr] = {}
    bl = list(b.terms.items())
    for (i1, j1), e in a.terms.items():
        for (i2, j2), c in bl:
            k = (i1 + i2, j1 + j2)
            cur = out.get(k)
            if cur is None:
                out[k] = {kk: v * c for kk, v in e.items()}
            else:
                raw_add_into(cur, e, c)
    return ParamPoly._raw({m: e for m, e in out.items() if e})


def _mul_param(a: ParamPoly, b: ParamPoly) -> ParamPoly:
    out: Dict[Monomial, RawExpr] = {}
    bl = list(b.terms.items())
    for (i1, j1), e1 in a.terms.items():
        e1l = list(e1.items())
        for (i2, j2), e2 in bl:
            k = (i1 + i2, j1 + j2)
            cur = out.get(k)
            if cur is None:
                cur = out[k] = {}
            get = cur.get
            for k1, c1 in e1l:
                for k2, c2 in e2.items():
                    kk = pm_mul(k1, k2)
                    cur[kk] = get(kk, _Q0) + c1 * c2
    res = {}
    for m, e in out.items():
        e = {k: c for k, c in e.items() if c}
        if e:
            res[m] = e
    return ParamPoly._raw(res)


# -- systems ------------------------------------------------------------------------

class PolySystem:
    """Equations (each required to vanish) over a set of unknown symbol ids."""

    def __init__(self, equations: Iterable = (), unknowns: Optional[Iterable] = None):
        eqs = []
        for e in equations:
            if not isinstance(e, ParamExpr):
                e = ParamExpr(e)
            if e.terms:
                eqs.append(e)
        self.equations: List[ParamExpr] = eqs
        syms = set()
        for e in eqs:
            syms |= e.symbols()
        if unknowns is None:
            self.unknowns = frozenset(syms)
        else:
            self.unknowns = frozenset(s.id if isinstance(s, ParamSymbol) else int(s) for s in unknowns)
            missing = syms - self.unknowns
            if missing:
                raise ValueError(f"equations mention symbols outside unknowns: "
                                 f"{sorted(symbol_name(s) for s in missing)}")

    def __len__(self):
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def degree(self) -> int:
        return max((e.degree() for e in self.equations), default=-1)

    def is_satisfied_by(self, assignment: Assignment) -> bool:
        return all(not e.subs(assignment).terms for e in self.equations)

    def __repr__(self):
        return f"PolySystem({len(self.equations)} equations, {len(self.unknowns)} unknowns)"


def generic_candidate(degree: int, prefix: str) -> Tuple[ParamPoly, List[ParamSymbol]]:
    """Dense polynomial of total degree <= ``degree`` with one fresh symbol per monomial.

    Monomials are enumerated by increasing degree and, within a degree, by
    decreasing power of x; the symbols are named ``prefix0, prefix1, ...``.
    """
    if degree < 0:
        return ParamPoly._raw({}), []
    syms = []
    terms = {}
    n = 0
    for d in range(degree + 1):
        for i in range(d, -1, -1):
            s = fresh_symbol(f"{prefix}{n}")
            n += 1
            syms.append(s)
            terms[(i, d - i)] = {(s.id,): _Q1}
    return ParamPoly._raw(terms), syms


def candidate_on_monomials(monos: Iterable[Monomial], prefix: str) -> Tuple[ParamPoly, List[ParamSymbol]]:
    syms = []
    terms = {}
    for n, m in enumerate(sorted(set(monos), key=grlex_key)):
        s = fresh_symbol(f"{prefix}{n}")
        syms.append(s)
        terms[m] = {(s.id,): _Q1}
    return ParamPoly._raw(terms), syms


def collect(equation: ParamPoly, unknowns: Optional[Iterable] = None) -> PolySystem:
    """One equation per (x, y)-monomial with a nonzero coefficient."""
    eqs = [ParamExpr._raw(dict(equation.terms[m]))
           for m in sorted(equation.terms, key=grlex_key, reverse=True)]
    return PolySystem(eqs, unknowns)


def substitute(p: ParamPoly, s: Assignment) -> ParamPoly:
    if not s.values:
        return ParamPoly._raw({m: dict(e) for m, e in p.terms.items()})
    out = {}
    for m, e in p.terms.items():
        r = subs_raw(e, s.values)
        if r:
            out[m] = r
    return ParamPoly._raw(out)


def apply_field(N, M, f):
    """``N * df/dx + M * df/dy`` for BivarPoly or ParamPoly arguments."""
    fx, fy = f.diff("x"), f.diff("y")
    return _mixed_mul(N, fx) + _mixed_mul(M, fy)


def _mixed_mul(a, b):
    if isinstance(a, BivarPoly) and isinstance(b, BivarPoly):
        return a * b
    if isinstance(a, BivarPoly):
        return b * a
    return a * b
