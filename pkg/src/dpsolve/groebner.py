"""Buchberger's algorithm over QQ in degree-reverse-lexicographic order.

Polynomials are dicts mapping exponent tuples to mpq.  The algorithm uses
the sugar selection strategy and the Gebauer-Moeller criteria; the number
of S-polynomials reduced is bounded by a budget.
"""

from __future__ import annotations

import heapq
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .deadline import NEVER, Deadline
from .errors import Exhausted

Exp = Tuple[int, ...]
GPoly = Dict[Exp, "mpq"]


def grevlex_key(e: Exp):
    return (sum(e), tuple(-v for v in reversed(e)))


class _Ring:
    """Per-computation cache of monomial order keys."""

    def __init__(self, nvars: int):
        self.n = nvars
        self._keys: Dict[Exp, tuple] = {}

    def key(self, e: Exp):
        k = self._keys.get(e)
        if k is None:
            k = self._keys[e] = grevlex_key(e)
        return k

    def lead(self, p: GPoly) -> Exp:
        return max(p, key=self.key)


def _mul_exp(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


def _divides(a: Exp, b: Exp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exp, b: Exp) -> Exp:
    return tuple(max(x, y) for x, y in zip(a, b))


def _quo(b: Exp, a: Exp) -> Exp:
    return tuple(y - x for x, y in zip(a, b))


def monic(ring: _Ring, p: GPoly) -> GPoly:
    lc = p[ring.lead(p)]
    if lc == 1:
        return p
    inv = 1 / lc
    return {e: c * inv for e, c in p.items()}


class _Basis:
    def __init__(self, ring: _Ring):
        self.ring = ring
        self.polys: List[GPoly] = []
        self.leads: List[Exp] = []
        self.alive: List[bool] = []

    def add(self, p: GPoly) -> int:
        self.polys.append(p)
        self.leads.append(self.ring.lead(p))
        self.alive.append(True)
        return len(self.polys) - 1


def reduce_full(ring: _Ring, p: GPoly, polys: Sequence[GPoly], leads: Sequence[Exp],
                deadline: Deadline = NEVER) -> GPoly:
    """Complete reduction of ``p`` by the (monic) divisors."""
    key = ring.key
    acc: GPoly = dict(p)
    heap = [(_neg(key(e)), e) for e in acc]
    heapq.heapify(heap)
    out: GPoly = {}
    steps = 0
    while heap:
        _, e = heapq.heappop(heap)
        c = acc.pop(e, None)
        if c is None:
            continue  # stale heap entry
        for i, le in enumerate(leads):
            if _divides(le, e):
                q = _quo(e, le)
                for ge, gc in polys[i].items():
                    if ge == le:
                        continue
                    me = _mul_exp(ge, q)
                    v = acc.get(me)
                    if v is None:
                        acc[me] = -c * gc
                        heapq.heappush(heap, (_neg(key(me)), me))
                    else:
                        v = v - c * gc
                        if v:
                            acc[me] = v
                        else:
                            del acc[me]
                break
        else:
            out[e] = c
        steps += 1
        if steps % 32 == 0:
            deadline.check("groebner reduction")
    return out


def _neg(k):
    # heap is a min-heap; order keys are tuples of ints, negate elementwise
    return (-k[0], tuple(-v for v in k[1]))


def groebner(polys: Sequence[GPoly], nvars: int, max_spolys: int = 20000,
             deadline: Deadline = NEVER, counter: Optional[List[int]] = None) -> List[GPoly]:
    """Reduced Groebner basis (monic, sorted by leading monomial descending).

    ``counter[0]`` is incremented once per S-polynomial reduced.
    """
    ring = _Ring(nvars)
    gens = [monic(ring, p) for p in polys if p]
    if not gens:
        return []
    for p in gens:
        if len(p) == 1 and not any(next(iter(p))):
            return [{(0,) * nvars: mpq(1)}]
    # inter-reduce the input first
    gens = _interreduce(ring, gens, deadline)
    if _is_one(gens, nvars):
        return gens
    basis = _Basis(ring)
    sugar: List[int] = []
    pairs: List[Tuple[int, int, int, tuple]] = []  # heap of (sugar, lcm key, i, j)

    def update(h_idx: int):
        nonlocal pairs
        lh = basis.leads[h_idx]
        cand = []
        for i in range(h_idx):
            if basis.alive[i]:
                cand.append((i, _lcm(basis.leads[i], lh)))
        # Gebauer-Moeller: drop pairs whose lcm is a proper multiple of another's lcm
        keep = []
        for i, l in cand:
            coprime = all(a == 0 or b == 0 for a, b in zip(basis.leads[i], lh))
            if coprime:
                continue
            if any(l2 != l and _divides(l2, l) for _, l2 in cand):
                continue
            keep.append((i, l))
        seen = set()
        for i, l in keep:
            if l in seen:
                continue
            seen.add(l)
            s = max(sugar[i] + sum(l) - sum(basis.leads[i]), sugar[h_idx] + sum(l) - sum(lh))
            heapq.heappush(pairs, (s, ring.key(l), i, h_idx))
        # drop old pairs (a, b) with lh | lcm(a, b) and lcm differs from both new lcms
        new_pairs = []
        for s, k, a, b in pairs:
            la, lb = basis.leads[a], basis.leads[b]
            l = _lcm(la, lb)
            if b != h_idx and _divides(lh, l) and _lcm(la, lh) != l and _lcm(lb, lh) != l:
                continue
            new_pairs.append((s, k, a, b))
        heapq.heapify(new_pairs)
        pairs = new_pairs
        for i in range(h_idx):
            if basis.alive[i] and _divides(lh, basis.leads[i]):
                basis.alive[i] = False

    for g in sorted(gens, key=lambda p: ring.key(ring.lead(p))):
        idx = basis.add(g)
        sugar.append(max(sum(e) for e in g))
        update(idx)

    count = 0
    while pairs:
        deadline.check("groebner")
        s, _, i, j = heapq.heappop(pairs)
        count += 1
        if counter is not None:
            counter[0] += 1
        if count > max_spolys:
            raise Exhausted(f"Groebner basis exceeded {max_spolys} S-polynomials")
        sp = _spoly(basis.polys[i], basis.leads[i], basis.polys[j], basis.leads[j])
        act = [k for k in range(len(basis.polys)) if basis.alive[k]]
        r = reduce_full(ring, sp, [basis.polys[k] for k in act], [basis.leads[k] for k in act], deadline)
        if not r:
            continue
        r = monic(ring, r)
        lr = ring.lead(r)
        if not any(lr):
            return [{(0,) * nvars: mpq(1)}]
        idx = basis.add(r)
        sugar.append(s)
        update(idx)

    live = [basis.polys[k] for k in range(len(basis.polys)) if basis.alive[k]]
    return _reduce_basis(ring, live, deadline)


def _spoly(f: GPoly, lf: Exp, g: GPoly, lg: Exp) -> GPoly:
    l = _lcm(lf, lg)
    qf, qg = _quo(l, lf), _quo(l, lg)
    out: GPoly = {}
    for e, c in f.items():
        out[_mul_exp(e, qf)] = c
    for e, c in g.items():
        me = _mul_exp(e, qg)
        v = out.get(me, 0) - c
        if v:
            out[me] = v
        else:
            out.pop(me, None)
    return out


def _is_one(gens, nvars):
    return len(gens) == 1 and len(gens[0]) == 1 and not any(next(iter(gens[0])))


def _interreduce(ring: _Ring, gens: List[GPoly], deadline: Deadline) -> List[GPoly]:
    gens = list(gens)
    changed = True
    while changed:
        changed = False
        gens.sort(key=lambda p: ring.key(ring.lead(p)))
        out: List[GPoly] = []
        for p in gens:
            leads = [ring.lead(q) for q in out]
            r = reduce_full(ring, p, out, leads, deadline)
            if r:
                r = monic(ring, r)
                if r != p:
                    changed = True
                if not any(ring.lead(r)):
                    return [{(0,) * ring.n: mpq(1)}]
                out.append(r)
            else:
                changed = True
        gens = out
    return gens


def _reduce_basis(ring: _Ring, live: List[GPoly], deadline: Deadline) -> List[GPoly]:
    leads = [ring.lead(p) for p in live]
    minimal = []
    for i, p in enumerate(live):
        li = leads[i]
        if any(j != i and _divides(leads[j], li) and (leads[j] != li or j < i) for j in range(len(live))):
            continue
        minimal.append(p)
    out = []
    for i, p in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        lp = ring.lead(p)
        tail = {e: c for e, c in p.items() if e != lp}
        r = reduce_full(ring, tail, others, [ring.lead(q) for q in others], deadline)
        r[lp] = p[lp]
        out.append(monic(ring, r))
    out.sort(key=lambda p: ring.key(ring.lead(p)), reverse=True)
    return out


def normal_form(p: GPoly, basis: Sequence[GPoly], nvars: int) -> GPoly:
    ring = _Ring(nvars)
    return reduce_full(ring, p, basis, [ring.lead(q) for q in basis])


def leading_exp(p: GPoly) -> Exp:
    return max(p, key=grevlex_key)


def is_zero_dimensional(basis: Sequence[GPoly], nvars: int) -> bool:
    pure = set()
    for g in basis:
        le = leading_exp(g)
        nz = [i for i, v in enumerate(le) if v]
        if len(nz) == 1:
            pure.add(nz[0])
    return len(pure) == nvars


def minimal_polynomial(var: int, basis: Sequence[GPoly], nvars: int,
                       max_degree: int = 200, deadline: Deadline = NEVER) -> Optional[List["mpq"]]:
    """Coefficients (low to high) of the monic minimal polynomial of ``var``
    modulo a zero-dimensional ideal given by its Groebner basis."""
    ring = _Ring(nvars)
    leads = [ring.lead(q) for q in basis]
    one = tuple(0 for _ in range(nvars))
    xv = tuple(1 if i == var else 0 for i in range(nvars))
    # rows: normal forms of var^k, reduced against each other (echelon on monomials)
    echelon: List[Tuple[Exp, GPoly, Dict[int, "mpq"]]] = []
    cur: GPoly = {one: mpq(1)}
    for k in range(max_degree + 1):
        deadline.check("minimal polynomial")
        nf = reduce_full(ring, cur, basis, leads, deadline)
        vec = dict(nf)
        combo: Dict[int, "mpq"] = {k: mpq(1)}
        for piv, row, rc in echelon:
            c = vec.get(piv)
            if c:
                for e, v in row.items():
                    nv = vec.get(e, 0) - c * v
                    if nv:
                        vec[e] = nv
                    else:
                        vec.pop(e, None)
                for i, v in rc.items():
                    nv = combo.get(i, 0) - c * v
                    if nv:
                        combo[i] = nv
                    else:
                        combo.pop(i, None)
        if not vec:
            lc = combo[k]
            return [combo.get(i, mpq(0)) / lc for i in range(k + 1)]
        piv = max(vec, key=ring.key)
        inv = 1 / vec[piv]
        row = {e: v * inv for e, v in vec.items()}
        rc = {i: v * inv for i, v in combo.items()}
        echelon.append((piv, row, rc))
        cur = {_mul_exp(e, xv): c for e, c in nf.items()}
    return None
