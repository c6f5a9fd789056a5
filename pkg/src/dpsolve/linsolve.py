"""Exact solver for linear parameter systems.

Rows are kept as integer maps ``symbol id -> coefficient`` with the constant
term under key 0 (symbol ids start at 1).  Each new row is reduced against
the pivot rows, divided by its content, and the pivot rows are kept fully
reduced so the final solution can be read off directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import gcd as igcd, lcm as ilcm
from typing import Dict, FrozenSet, List, Optional

from gmpy2 import mpq

from .ansatz import Assignment, ParamExpr, PolySystem, symbol
from .deadline import NEVER, Deadline
from .errors import Inconsistent, NotLinear

Row = Dict[int, int]
_CONST = 0


@dataclass
class LinearSolveReport:
    solution: Assignment
    free_symbols: FrozenSet = field(default_factory=frozenset)
    rank: int = 0

    @property
    def free_ids(self) -> FrozenSet[int]:
        return frozenset(s.id for s in self.free_symbols)


def _row_from_expr(e: ParamExpr) -> Row:
    den = 1
    for k, c in e.terms.items():
        if len(k) > 1:
            raise NotLinear(f"equation of parameter degree {len(k)}: {e}")
        den = ilcm(den, int(c.denominator))
    row = {}
    for k, c in e.terms.items():
        row[k[0] if k else _CONST] = int(c * den)
    return _primitive(row)


def _primitive(row: Row) -> Row:
    g = reduce(igcd, row.values(), 0)
    if g > 1:
        row = {k: v // g for k, v in row.items()}
    return row


def _pivot_of(row: Row) -> Optional[int]:
    syms = [k for k in row if k != _CONST]
    return min(syms) if syms else None


def _eliminate(row: Row, piv: int, prow: Row) -> Row:
    """``row`` with symbol ``piv`` removed using the pivot row ``prow``."""
    a = row[piv]
    b = prow[piv]
    g = igcd(a, b)
    fa, fb = b // g, a // g
    if fa < 0:
        fa, fb = -fa, -fb
    out = {k: v * fa for k, v in row.items()} if fa != 1 else dict(row)
    for k, v in prow.items():
        nv = out.get(k, 0) - fb * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return _primitive(out)


def solve_linear(system: PolySystem, deadline: Deadline = NEVER) -> LinearSolveReport:
    """Solve a system whose equations are affine in the unknowns.

    Raises :class:`NotLinear` if some equation has parameter degree > 1 and
    :class:`Inconsistent` if no solution exists.
    """
    rows: List[Row] = []
    seen = set()
    for e in system.equations:
        r = _row_from_expr(e)
        if not r:
            continue
        lead = r[_pivot_of(r)] if _pivot_of(r) is not None else r[_CONST]
        if lead < 0:
            r = {k: -v for k, v in r.items()}
        key = frozenset(r.items())
        if key not in seen:
            seen.add(key)
            rows.append(r)
    # sparse rows first; ties broken by content for determinism
    rows.sort(key=lambda r: (len(r), sorted(r.items())))

    pivots: Dict[int, Row] = {}
    occurs: Dict[int, set] = {}  # symbol -> pivots whose row mentions it

    for n, r in enumerate(rows):
        if n % 32 == 0:
            deadline.check("solve_linear")
        for s in [k for k in r if k in pivots]:
            if s in r:
                r = _eliminate(r, s, pivots[s])
        # eliminating one pivot never reintroduces another: pivot rows are reduced
        if not r:
            continue
        piv = _pivot_of(r)
        if piv is None:
            raise Inconsistent("linear system is inconsistent")
        if r[piv] < 0:
            r = {k: -v for k, v in r.items()}
        for other in list(occurs.get(piv, ())):
            old = pivots[other]
            new = _eliminate(old, piv, r)
            pivots[other] = new
            for k in old:
                if k != _CONST and k != other and k not in new:
                    occurs[k].discard(other)
            for k in new:
                if k != _CONST and k != other:
                    occurs.setdefault(k, set()).add(other)
        occurs.pop(piv, None)
        pivots[piv] = r
        for k in r:
            if k != _CONST and k != piv:
                occurs.setdefault(k, set()).add(piv)

    values = {}
    for piv, r in pivots.items():
        c = r[piv]
        expr = {}
        for k, v in r.items():
            if k == piv:
                continue
            expr[(k,) if k != _CONST else ()] = mpq(-v, c)
        values[piv] = expr
    sol = Assignment()
    sol.values = values
    free = frozenset(symbol(s) for s in system.unknowns if s not in pivots)
    return LinearSolveReport(solution=sol, free_symbols=free, rank=len(pivots))


def check_solution(system: PolySystem, report: LinearSolveReport) -> bool:
    return system.is_satisfied_by(report.solution)
