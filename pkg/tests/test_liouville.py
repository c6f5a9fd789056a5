import pytest

from dpsolve.darboux import DarbouxPair, VectorField, apply
from dpsolve.errors import NoAlgebraicIF, NoDarbouxIF, QuadratureNotClosed
from dpsolve.liouville import (FirstIntegral, IntegratingFactor, first_integral, solve_exp_part,
                               solve_exponents, verify_fi, verify_if)
from dpsolve.parse import parse_poly
from dpsolve.poly import Q, exact_div
from dpsolve.ratfunc import RatFunc

P = parse_poly
D0 = VectorField.from_ode("(-y^7+x*y^4-x^2*y+y^2)/(2*x*y^6-7*x^2*y^3+2*x^3+3*x*y)")
CIRCLE = VectorField(N=P("y"), M=P("-x"))


def pair(D, p):
    p = P(p) if isinstance(p, str) else p
    return DarbouxPair(p, exact_div(apply(D, p), p))


def ex1_dps():
    return [pair(D0, s) for s in ("y", "x*y^2-1", "y^3-x")]


def ex1_R():
    return IntegratingFactor([(P("y"), Q(1)), (P("x*y^2-1"), Q(-1)), (P("y^3-x"), Q(-2))])


def test_solve_exponents_example1():
    R = solve_exponents(ex1_dps(), D0)
    assert dict(R.factors) == {P("y"): 1, P("x*y^2-1"): -1, P("y^3-x"): -2}
    assert verify_if(R, D0)


def test_solve_exponents_divergence_free():
    R = solve_exponents([pair(CIRCLE, "x^2+y^2")], CIRCLE)
    assert R.factors == [] and verify_if(R, CIRCLE)


def test_solve_exponents_inconsistent():
    # q(x) = 1+y and T0 = 2+y: the y coefficient forces n = -1, the constant then fails
    F = VectorField(N=P("x+x*y"), M=P("y"))
    with pytest.raises(NoAlgebraicIF):
        solve_exponents([pair(F, "x")], F)


def test_solve_exponents_consistent_when_cofactor_matches():
    F = VectorField(N=P("x"), M=P("x+y"))
    R = solve_exponents([pair(F, "x")], F)
    assert dict(R.factors) == {P("x"): -2} and verify_if(R, F)


def test_verify_if_examples():
    assert verify_if(ex1_R(), D0)
    assert not verify_if(IntegratingFactor(), D0)
    # a rational multiple changes nothing in the logarithmic derivative
    assert verify_if(IntegratingFactor([(P("2*y"), Q(1)), (P("x*y^2-1"), Q(-1)), (P("y^3-x"), Q(-2))]), D0)


def test_exp_part_planted():
    # G = exp(1/y)*x^2*y^2 is a first integral and R = exp(1/y)*x an integrating factor of
    # N = G_y/R, M = -G_x/R
    F = VectorField(N=P("2*x*y-x"), M=P("-2*y^2"))
    R0 = IntegratingFactor([(P("x"), Q(1))], RatFunc(P("1"), P("y")))
    assert verify_if(R0, F)
    dps = [pair(F, "x"), pair(F, "y")]
    R = solve_exp_part(dps, F)
    assert verify_if(R, F)
    assert R.exp_part.den == P("y") and R.exp_part.num.is_constant()


def test_exp_part_polynomial_B_reduces_to_exponents():
    R = solve_exp_part(ex1_dps(), D0, include_polynomial=True)
    assert verify_if(R, D0)


def test_exp_part_exhausts():
    with pytest.raises(NoDarbouxIF):
        solve_exp_part([pair(D0, "y")], D0)


def test_first_integral_example1():
    I = first_integral(ex1_R(), D0)
    assert verify_fi(I, D0)
    ref = FirstIntegral(RatFunc(P("x"), P("-y^3+x")), [(Q(-1), P("x*y^2-1"))])
    assert verify_fi(ref, D0)
    # dI agrees with the reference up to a constant factor
    c = None
    for v in ("x", "y"):
        a, b = I.diff(v), ref.diff(v)
        if b.is_zero():
            assert a.is_zero()
            continue
        r = a * RatFunc(b.den, b.num)
        assert r.num.is_constant() and r.den.is_constant()
        k = r.num.constant_value() / r.den.constant_value()
        assert c is None or c == k
        c = k


def test_first_integral_circle():
    I = first_integral(IntegratingFactor(), CIRCLE)
    assert verify_fi(I, CIRCLE)
    assert not I.log_terms
    ratio = I.rational_part.num.scale(1 / I.rational_part.num.leading_coeff())
    assert ratio == P("x^2+y^2")


def test_first_integral_not_closed():
    R = IntegratingFactor([(P("y"), Q("1/2"))])
    with pytest.raises(QuadratureNotClosed):
        first_integral(R, D0)
    with pytest.raises(QuadratureNotClosed):
        first_integral(IntegratingFactor([], RatFunc(P("1"), P("y"))), D0)


def test_verify_fi_examples():
    assert not verify_fi(FirstIntegral(RatFunc(P("x"))), D0)
    const = FirstIntegral(RatFunc(P("3")))
    assert verify_fi(const, D0) and const.is_constant()
