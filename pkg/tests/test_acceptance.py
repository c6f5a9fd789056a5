"""Acceptance criteria 1-8; each test records one PASS/FAIL line.

Tolerances are pinned below.  All algebraic checks are exact.
"""

import random
import time

import pytest
import sympy

from conftest import ACCEPTANCE_LINES
from dpsolve.corpus import builtin_corpus, get_case
from dpsolve.darboux import (SearchConfig, VectorField, apply, check_outcome, commutator_coeffs,
                             delta, divergence_T, run_auto, run_method, stage_E1,
                             stage_E2_colin, stage_E3_cofactors)
from dpsolve.errors import MethodFailed, QuadratureNotClosed
from dpsolve.liouville import FirstIntegral, first_integral, verify_fi, verify_if
from dpsolve.parse import parse_poly
from dpsolve.poly import Q, exact_div, normalize_primitive
from dpsolve.polysys import SolveBudget, solve_poly_system
from dpsolve.ratfunc import RatFunc
from oracle import random_system, rational_points
from planted import planted_field, random_poly

P = parse_poly

# pinned limits
EX1_SECONDS = 60.0
CORPUS_SECONDS = 120.0
MUC_SECONDS = 120.0
PLANTED_SECONDS = 60.0
PLANTED_COUNT, PLANTED_REQUIRED = 50, 45
IDENTITY_INSTANCES = 200
ORACLE_INSTANCES = 100

EX1 = "(-y^7+x*y^4-x^2*y+y^2)/(2*x*y^6-7*x^2*y^3+2*x^3+3*x*y)"
D0_EX1 = VectorField.from_ode(EX1)


def record(n, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def same_differential(I: FirstIntegral, J: FirstIntegral) -> bool:
    """dI = c*dJ for a nonzero rational constant c."""
    c = None
    for v in ("x", "y"):
        a, b = I.diff(v), J.diff(v)
        if b.is_zero() or a.is_zero():
            if not (a.is_zero() and b.is_zero()):
                return False
            continue
        r = a * RatFunc(b.den, b.num)
        if not (r.num.is_constant() and r.den.is_constant()):
            return False
        k = r.num.constant_value() / r.den.constant_value()
        if c is not None and k != c:
            return False
        c = k
    return c is not None


# -- 1 ------------------------------------------------------------------------------

def test_criterion_1_example1_pipeline():
    ref = FirstIntegral(RatFunc(P("x"), P("-y^3+x")), [(Q(-1), P("x*y^2-1"))])
    want_dps = {P("y"), P("x*y^2-1"), P("y^3-x")}
    want_exp = {P("y"): 1, P("x*y^2-1"): -1, P("y^3-x"): -2}
    notes, ok = [], True
    for m in ("colin", "singer"):
        t = time.monotonic()
        out = run_method(D0_EX1, SearchConfig(method=m, time_limit=EX1_SECONDS))
        I = first_integral(out.integrating_factor, D0_EX1)
        dt = time.monotonic() - t
        good = ({d.p for d in out.dps} == want_dps
                and dict(out.integrating_factor.factors) == want_exp
                and verify_if(out.integrating_factor, D0_EX1)
                and verify_fi(I, D0_EX1) and same_differential(I, ref)
                and dt < EX1_SECONDS)
        ok &= good
        notes.append(f"{m}: {'ok' if good else 'mismatch'} {dt:.1f}s")
    record(1, ok, "; ".join(notes))


# -- 2 ------------------------------------------------------------------------------

def test_criterion_2_associated_field():
    N1, M1 = P("-7*x*y^5+x^2*y^2+5*y^3+x"), P("y^6-3*x*y^3+2*y")
    e1 = stage_E1(D0_EX1, SearchConfig(dg=6))
    sols = stage_E2_colin(e1)
    hit = False
    for s in sols:
        if s.d1.N.is_zero():
            continue
        c = N1.leading_coeff() / s.d1.N.leading_coeff()
        hit |= s.d1.N.scale(c) == N1 and s.d1.M.scale(c) == M1
    record(2, hit, f"(dg, d_I) = (6, 7): {len(sols)} families, printed D1 {'found' if hit else 'missing'}")


# -- 3 ------------------------------------------------------------------------------

def test_criterion_3_cofactor_families():
    D1 = VectorField(N=P("-7*x*y^5+x^2*y^2+5*y^3+x"), M=P("y^6-3*x*y^3+2*y"))
    e3 = stage_E3_cofactors(D0_EX1, D1)
    printed = [(P("y^6-y"), P("-y^5+x*y^2-1")), (P("x*y^3"), P("y^5+x*y^2")), (P("x^2"), P("y^5+3*x*y^2-1"))]
    sat = all((RatFunc(apply(D0_EX1, q1) - apply(D1, q0)) - e3.F0 * RatFunc(q0) - e3.F1 * RatFunc(q1)).is_zero()
              for q0, q1 in printed)
    # the printed vectors are independent, so they span the 3-dimensional solution space
    stacked = [(q0 + q1 * P("x^20")).terms for q0, q1 in printed]
    monos = sorted(set().union(*stacked))
    mat = sympy.Matrix([[sympy.Rational(str(t.get(m, 0))) for m in monos] for t in stacked])
    rank = len(e3.report.free_symbols)
    ok = sat and rank == 3 and mat.rank() == 3
    record(3, ok, f"printed basis satisfies E3: {sat}; free part rank {rank}")


# -- 4 ------------------------------------------------------------------------------

CORPUS = builtin_corpus()


@pytest.mark.parametrize("case", CORPUS, ids=[c.id for c in CORPUS])
def test_criterion_4_corpus(case):
    D0 = VectorField.from_ratfunc(case.ode.phi)
    notes = []
    matched = False
    for m in ("impa", "singer", "colin"):
        t = time.monotonic()
        try:
            out = run_method(D0, SearchConfig(method=m, time_limit=CORPUS_SECONDS))
        except MethodFailed:
            notes.append(f"{m}: failed after {time.monotonic() - t:.1f}s")
            continue
        dt = time.monotonic() - t
        got = frozenset(normalize_primitive(d.p) for d in out.dps)
        assert all(d.check(D0) for d in out.dps)
        assert verify_if(out.integrating_factor, D0)
        if not case.verifiable:
            notes.append(f"{m}: ran ({', '.join(sorted(map(str, got)))}), equality exempt")
            matched = True
            break
        if got == case.expected_set() and dt <= CORPUS_SECONDS:
            notes.append(f"{m}: match in {dt:.1f}s")
            matched = True
            break
        notes.append(f"{m}: got {sorted(map(str, got))} in {dt:.1f}s")
    record(4, matched, f"{case.id}: " + "; ".join(notes))


# -- 5 ------------------------------------------------------------------------------

@pytest.mark.parametrize("cid", ["ex1", "ex10"])
def test_criterion_5_muc(cid):
    case = get_case(cid)
    D0 = VectorField.from_ratfunc(case.ode.phi)
    t = time.monotonic()
    try:
        out = run_method(D0, SearchConfig(method="muc", time_limit=MUC_SECONDS))
        got = frozenset(normalize_primitive(d.p) for d in out.dps)
    except MethodFailed:
        got = frozenset()
    dt = time.monotonic() - t
    ok = got == case.expected_set() and dt <= MUC_SECONDS
    record(5, ok, f"MUC {cid}: {sorted(map(str, got))} in {dt:.1f}s")


# -- 6 ------------------------------------------------------------------------------

def _small_planted(seed):
    return planted_field(10_000 + seed, max_factors=2, max_deg=2, max_total=3, with_exp=False)


@pytest.fixture(scope="module")
def singer_outputs():
    outs = []
    for i in range(IDENTITY_INSTANCES):
        pf = _small_planted(i)
        try:
            out = run_method(pf.D0, SearchConfig(method="singer", time_limit=30))
        except MethodFailed:
            continue
        outs.append((pf, out))
    return outs


def test_criterion_6a_darboux_pairs(singer_outputs):
    pairs = [(pf.D0, d) for pf, out in singer_outputs for d in out.dps]
    ok = len(singer_outputs) >= IDENTITY_INSTANCES * 0.9 and len(pairs) >= IDENTITY_INSTANCES
    ok &= all(apply(D0, d.p) == d.q0 * d.p for D0, d in pairs)
    record("6a", ok, f"{len(pairs)} emitted pairs from {len(singer_outputs)} pipeline runs satisfy D0(p) = q*p")


def test_criterion_6b_commutator(singer_outputs):
    n = 0
    ok = True
    for pf, out in singer_outputs:
        D0, D1 = pf.D0, out.associated.d1
        F0, F1 = commutator_coeffs(D0, D1)
        for comp in ("N", "M"):
            lhs = RatFunc(apply(D0, getattr(D1, comp)) - apply(D1, getattr(D0, comp)))
            ok &= lhs == F0 * RatFunc(getattr(D0, comp)) + F1 * RatFunc(getattr(D1, comp))
        n += 1
    ok &= n >= IDENTITY_INSTANCES * 0.9
    record("6b", ok, f"commutator identity on {n} accepted (D0, D1) pairs")


def _field_with_dp(rng, p):
    # N = a*p + b*p_y, M = c*p - b*p_x keeps p invariant with cofactor a*p_x + c*p_y
    a, b, c = (random_poly(rng, rng.randint(0, 2), 3, require_degree=False) for _ in range(3))
    N, M = a * p + b * p.diff("y"), c * p - b * p.diff("x")
    if N.is_zero() and M.is_zero():
        return None
    return VectorField(N=N, M=M)


def test_criterion_6c_common_dp_cofactors():
    rng = random.Random(606)
    n = 0
    ok = True
    while n < IDENTITY_INSTANCES:
        p = random_poly(rng, rng.randint(1, 3), rng.randint(2, 4))
        D0, D1 = _field_with_dp(rng, p), _field_with_dp(rng, p)
        if D0 is None or D1 is None or delta(D0, D1).is_zero():
            continue
        q0, q1 = exact_div(apply(D0, p), p), exact_div(apply(D1, p), p)
        F0, F1 = commutator_coeffs(D0, D1)
        r = RatFunc(apply(D0, q1) - apply(D1, q0)) - F0 * RatFunc(q0) - F1 * RatFunc(q1)
        ok &= r.is_zero()
        n += 1
    record("6c", ok, f"D0(q1) - D1(q0) = q0*F0 + q1*F1 on {n} planted common Darboux polynomials")


def test_criterion_6d_inverse_factor(singer_outputs):
    ok = True
    for pf, out in singer_outputs:
        s = out.associated
        ok &= delta(pf.D0, s.d1) == s.inv_factor * divergence_T(pf.D0)
        ok &= apply(s.d1, s.inv_factor) == s.inv_factor * divergence_T(s.d1)
    ok &= len(singer_outputs) >= IDENTITY_INSTANCES * 0.9
    record("6d", ok, f"Delta = I*T0 and D1(I) = I*T1 on {len(singer_outputs)} SInGeR outputs")


def test_criterion_6e_gates(singer_outputs):
    n_if = n_fi = 0
    ok = True
    for pf, out in singer_outputs:
        ok &= verify_if(out.integrating_factor, pf.D0)
        n_if += 1
        try:
            I = first_integral(out.integrating_factor, pf.D0)
        except QuadratureNotClosed:
            continue
        ok &= verify_fi(I, pf.D0) and not I.is_constant()
        n_fi += 1
    ok &= n_if >= IDENTITY_INSTANCES * 0.9
    record("6e", ok, f"verify_if on {n_if} outputs, verify_fi on {n_fi} first integrals")


# -- 7 ------------------------------------------------------------------------------

def test_criterion_7_planted_recovery():
    good = 0
    worst = 0.0
    fails = []
    for i in range(PLANTED_COUNT):
        pf = planted_field(i)
        t = time.monotonic()
        try:
            out = run_auto(pf.D0, SearchConfig(time_limit=PLANTED_SECONDS))
        except MethodFailed:
            fails.append(i)
            continue
        dt = time.monotonic() - t
        worst = max(worst, dt)
        got = frozenset(normalize_primitive(d.p) for d in out.dps)
        gates = verify_if(out.integrating_factor, pf.D0) and all(ok for _, ok in check_outcome(pf.D0, out))
        try:
            I = first_integral(out.integrating_factor, pf.D0)
            gates &= verify_fi(I, pf.D0)
        except QuadratureNotClosed:
            pass
        # extra emitted curves are allowed (a field may carry invariant curves nobody planted),
        # but each one is a genuine Darboux polynomial by the gates above
        if pf.planted_set <= got and gates and dt <= PLANTED_SECONDS:
            good += 1
        else:
            fails.append(i)
    record(7, good >= PLANTED_REQUIRED,
           f"{good}/{PLANTED_COUNT} planted fields recovered (need {PLANTED_REQUIRED}); slowest {worst:.1f}s; misses {fails}")


# -- 8 ------------------------------------------------------------------------------

def test_criterion_8_solver_oracle():
    budget = SolveBudget(max_case_splits=10 ** 4, max_groebner_spolys=10 ** 6, time_limit_ms=10 ** 7)
    agree = checked = skipped = 0
    seed = 0
    while checked < ORACLE_INSTANCES:
        system, syms = random_system(seed)
        seed += 1
        order = [s.id for s in syms]
        pts = rational_points(system, order)
        if pts is None:
            # positive-dimensional: outside the finite-enumeration oracle
            skipped += 1
            continue
        checked += 1
        fams = solve_poly_system(system, budget)
        if any(f.free_symbols for f in fams):
            continue
        got = set()
        for f in fams:
            vals = [f.value(s).constant() for s in order]
            got.add(tuple(sympy.Rational(int(v.numerator), int(v.denominator)) for v in vals))
        agree += got == pts
    record(8, agree == checked, f"{agree}/{checked} systems agree with the resultant oracle ({skipped} positive-dimensional skipped)")
