import pytest
from hypothesis import given, settings, strategies as st

from dpsolve import BivarPoly, RatFunc, X, Y, canon, exact_div, gcd, normalize_primitive
from dpsolve.errors import DivisionByZeroPoly, NotDivisible, ZeroPolynomial
from dpsolve.parse import parse_poly
from dpsolve.poly import Q, evaluate

P = parse_poly
M0 = P("-y^7+x*y^4-x^2*y+y^2")
N0 = P("2*x*y^6-7*x^2*y^3+2*x^3+3*x*y")

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeffs, max_size=5).map(BivarPoly)
nonzero = polys.filter(lambda p: not p.is_zero())


def test_arith_examples():
    assert (X + Y) * (X - Y) == X ** 2 - Y ** 2
    assert M0 + BivarPoly.zero() == M0
    assert (N0 - N0).is_zero()
    with pytest.raises(ValueError):
        X ** -1


def test_zero_degree_sentinel():
    assert BivarPoly.zero().degree() == -1
    assert BivarPoly.one().degree() == 0


def test_diff_examples():
    assert M0.diff("y") == P("-7*y^6+4*x*y^3-x^2+2*y")
    assert BivarPoly.const(7).diff("x").is_zero()
    assert N0.diff("x") == P("2*y^6-14*x*y^3+6*x^2+3*y")


def test_exact_div_examples():
    assert exact_div(P("x^2-y^2"), P("x-y")) == P("x+y")
    assert exact_div(P("x*y^2-1") * P("-y^3+x"), P("x*y^2-1")) == P("-y^3+x")
    with pytest.raises(NotDivisible):
        exact_div(P("x^2+y"), P("x+1"))
    with pytest.raises(DivisionByZeroPoly):
        exact_div(X, BivarPoly.zero())


def test_gcd_examples():
    assert gcd(P("x^2*y-y"), P("x*y-y")) == P("x*y-y")
    assert gcd(P("2*x+4*y"), BivarPoly.zero()) == P("x+2*y")
    assert gcd(P("x+y"), P("x-y")) == BivarPoly.one()


def test_canon_examples():
    assert canon(RatFunc(P("x^2-y^2"), P("x-y"))) == RatFunc(P("x+y"))
    phi = RatFunc(M0, N0)
    assert canon(phi).num == M0 and canon(phi).den == N0
    r = canon(RatFunc(P("2*x"), BivarPoly.const(-2)))
    assert r.num == P("-x") and r.den == BivarPoly.one()


def test_normalize_primitive_examples():
    assert normalize_primitive(P("-y^3+x")) == P("y^3-x")
    assert normalize_primitive(P("4/3*x-2")) == P("2*x-3")
    assert normalize_primitive(P("x*y^2-1")) == P("x*y^2-1")
    with pytest.raises(ZeroPolynomial):
        normalize_primitive(BivarPoly.zero())


def test_eval_examples():
    assert evaluate(P("x^2+y^2"), 3, 4) == 25
    assert evaluate(BivarPoly.zero(), Q("1/3"), 7) == 0
    assert evaluate(P("x*y^2-1"), 1, 1) == 0


def test_grlex_order():
    # x^3 outranks x*y (degree), x^2*y outranks x*y^2 (x > y)
    assert P("x*y+x^3").leading_monomial() == (3, 0)
    assert P("x*y^2+x^2*y").leading_monomial() == (2, 1)


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a and a + b == b + a


@settings(max_examples=60, deadline=None)
@given(polys)
def test_mixed_partials_commute(p):
    assert p.diff("x").diff("y") == p.diff("y").diff("x")


@settings(max_examples=60, deadline=None)
@given(polys, nonzero)
def test_exact_div_roundtrip(a, b):
    assert exact_div(a * b, b) == a


@settings(max_examples=40, deadline=None)
@given(nonzero, nonzero, nonzero)
def test_gcd_divides(a, b, c):
    g = gcd(a * c, b * c)
    qa, qb = exact_div(a * c, g), exact_div(b * c, g)
    assert gcd(qa, qb).is_constant()
    assert exact_div(g, normalize_primitive(c)) is not None


@settings(max_examples=40, deadline=None)
@given(polys, nonzero, st.integers(-3, 3), st.integers(-3, 3))
def test_canon_idempotent_and_value(n, d, x0, y0):
    r = canon(RatFunc(n, d))
    assert canon(r) == r
    dv = evaluate(d, x0, y0)
    if dv != 0:
        assert evaluate(r.num, x0, y0) / evaluate(r.den, x0, y0) == evaluate(n, x0, y0) / dv


@settings(max_examples=60, deadline=None)
@given(nonzero, coeffs.filter(lambda c: c != 0))
def test_normalize_scale_invariant(p, c):
    assert normalize_primitive(p.scale(Q(c))) == normalize_primitive(p)


@settings(max_examples=60, deadline=None)
@given(polys)
def test_print_parse_roundtrip(p):
    assert parse_poly(str(p)) == p
