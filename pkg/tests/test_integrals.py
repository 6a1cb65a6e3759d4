from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from opf.errors import DegenerateC2, PoleAtPoint, SingularAtPMOne, SingularSamplePoint, ZeroMu
from opf.exactpoly import UniPoly
from opf.families import family, lambda_n
from opf.integrals import (Const, Div, LinearForm, Poly, RatFunc, RiccatiForm, Sqrt, Var,
                           bridge_roundtrip_error, bridge_wv, chebyshev_solutions_residual,
                           chebyshev_system, check_first_integral_flow, first_integral_v,
                           first_integral_w, linear_to_riccati, reduced_equation, reduced_system,
                           riccati_form, riccati_to_linear, w_v_agreement)

v, x, w = sp.symbols("v x w")
RHO = 1 - x**2


def sympy_v_integral(n, mu):
    T, U = sp.chebyshevt(n, x), sp.chebyshevu(n - 1, x)
    return (RHO * sp.diff(U, x) + U * (mu * v - x)) / (RHO * sp.diff(T, x) + mu * T * v) * sp.sqrt(RHO)


def sympy_w_integral(n):
    T, U = sp.chebyshevt(n, x), sp.chebyshevu(n - 1, x)
    w1 = sp.diff(T, x) / T - x / (2 * RHO)
    w2 = sp.diff(U, x) / U - 3 * x / (2 * RHO)
    return (w2 - w) / (w1 - w) * (U / T) * sp.sqrt(RHO)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("mu", [1, -1, sp.Rational(2, 3)])
def test_v_integral_is_annihilated_by_the_field(n, mu):
    I = sympy_v_integral(n, mu)
    P = sp.Integer(n * n) / mu * RHO - x * v + mu * v**2
    assert sp.simplify(P * sp.diff(I, v) + RHO * sp.diff(I, x)) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_w_integral_is_constant_along_the_reduced_equation(n):
    lam = n * n
    q = (-2 - 4 * lam + (4 * lam - 1) * x**2) / (4 * RHO**2)
    I = sympy_w_integral(n)
    assert sp.simplify(sp.diff(I, x) + (q - w**2) * sp.diff(I, w)) == 0


def test_reduced_equation_is_the_normal_form():
    # y'' + p y' + q0 y = 0  ->  u'' + (q0 - p^2/4 - p'/2) u = 0, and w = u'/u gives w' = -(...) - w^2
    for n in range(1, 6):
        p, q0 = -x / RHO, sp.Integer(n * n) / RHO
        invariant = q0 - p**2 / 4 - sp.diff(p, x) / 2
        q = reduced_equation(n)
        mine = sum(sp.Rational(str(c)) * x**k for k, c in enumerate(q.num.coeffs)) / \
            sum(sp.Rational(str(c)) * x**k for k, c in enumerate(q.den.coeffs))
        assert sp.simplify(mine + invariant) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("mu", [1, -1])
def test_expression_trees_match_sympy(n, mu):
    Iv, ref = first_integral_v(n, mu), sympy_v_integral(n, mu)
    Iw, refw = first_integral_w(n), sympy_w_integral(n)
    for v0, x0 in [(0.3, 0.2), (-1.2, -0.7), (2.0, 0.45)]:
        assert complex(Iv(v0, x0)) == pytest.approx(complex(ref.subs({v: v0, x: x0}).evalf()), rel=1e-12)
        assert complex(Iw(v0, x0)) == pytest.approx(complex(refw.subs({w: v0, x: x0}).evalf()), rel=1e-12)


def test_chebyshev_pair_residuals():
    res = chebyshev_solutions_residual(5, np.linspace(-0.9, 0.9, 13))
    assert res.exact_zero and res.max_residual_T == 0
    assert res.max_residual_U < 1e-9
    outside = chebyshev_solutions_residual(3, [1.5, -2.0])
    assert outside.max_residual_U < 1e-9
    with pytest.raises(SingularSamplePoint):
        chebyshev_solutions_residual(3, [1.0])


@given(st.integers(1, 12))
def test_reduced_numerator(n):
    lam = Fraction(n * n)
    q = reduced_equation(n)
    assert list(q.num.coeffs) == [-2 - 4 * lam, 0, 4 * lam - 1]
    assert q.den == UniPoly([4, 0, -8, 0, 4])


def test_reduced_system_carries_the_equation():
    sys = reduced_system(2)
    assert sys.names == ("w", "x")
    q = reduced_equation(2)
    for w0, x0 in [(0.5, 0.1), (-1.0, 0.6)]:
        slope = sys.P.eval_float(w0, x0) / sys.Q.eval_float(w0, x0)
        assert slope == pytest.approx(q.eval(x0) - w0**2)


@given(st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(bool),
       st.sampled_from(["jacobi", "legendre", "hermite", "laguerre", "chebyshev_u"]),
       st.integers(0, 6))
def test_riccati_round_trip(mu, name, n):
    spec = family(name)
    back = riccati_to_linear(riccati_form(spec, n, mu))
    assert back.rho == spec.rho and back.tau == spec.tau and back.mu == mu
    assert back.lam == lambda_n(spec, n)
    lin = LinearForm(spec.rho, spec.tau, Fraction(n * (n + 1)), mu)
    assert riccati_to_linear(linear_to_riccati(lin)) == lin


def test_riccati_preconditions():
    one = RatFunc(UniPoly.const(1), UniPoly.const(1))
    zero = RatFunc(UniPoly([]), UniPoly.const(1))
    with pytest.raises(DegenerateC2):
        riccati_to_linear(RiccatiForm(one, one, zero))
    with pytest.raises(DegenerateC2):
        riccati_to_linear(RiccatiForm(one, one, RatFunc(UniPoly([0, 1]), UniPoly.const(1))))
    with pytest.raises(ZeroMu):
        linear_to_riccati(LinearForm(UniPoly.const(1), UniPoly([0, -2]), Fraction(2), Fraction(0)))


@given(st.floats(-5, 5), st.floats(-0.99, 0.99), st.sampled_from([1, -1, 2, Fraction(1, 3)]))
def test_bridge_is_invertible(v0, x0, mu):
    assert bridge_roundtrip_error(mu, [(v0, x0)]) < 1e-12


def test_bridge_exact_and_singular():
    br = bridge_wv(2)
    w0 = br.forward(Fraction(1), Fraction(1, 2))
    assert isinstance(w0, Fraction) and br.inverse(w0, Fraction(1, 2)) == 1
    with pytest.raises(SingularAtPMOne):
        br.forward(0.0, 1.0)
    with pytest.raises(ZeroMu):
        bridge_wv(0)


def test_forms_agree_through_the_bridge():
    rng = np.random.default_rng(7)
    pts = [(float(rng.uniform(-3, 3)), float(rng.uniform(-0.95, 0.95))) for _ in range(100)]
    for n in (1, 2, 3):
        for mu in (1, -1, 2):
            assert w_v_agreement(n, mu, pts) < 1e-9


@pytest.mark.parametrize("mu", [1, -1])
def test_flow_drift(mu):
    starts = [(0.2, 0.5), (-0.3, 0.1), (0.1, -0.4)]
    for n in (1, 2, 3):
        chk = check_first_integral_flow(first_integral_v(n, mu), chebyshev_system(n, mu), starts)
        assert chk.passed and chk.max_drift < 1e-6


def test_flow_switches_to_reciprocal_near_a_pole():
    # start on the denominator's zero set: rho T1' + T1 v = 1 - x^2 + x v vanishes at (0, -1/x + x)
    x0 = 0.5
    v0 = -(1 - x0**2) / x0
    chk = check_first_integral_flow(first_integral_v(1, 1), chebyshev_system(1, 1), [(v0, x0)], T=0.2)
    assert chk.reciprocal and chk.passed


def test_expression_printing_and_poles():
    Iv = first_integral_v(2, 1)
    assert str(Iv) == "((1-x^2)*U1' + U1*(v - x))*sqrt(1-x^2)/((1-x^2)*T2' + T2*v)"
    assert str(first_integral_v(2, -2)).endswith("T2*(-2*v))")
    e = Div(Const(Fraction(1)), Var("x"))
    with pytest.raises(PoleAtPoint):
        e.eval({"x": 0.0})
    assert Sqrt(Poly("(1-x^2)", UniPoly([1, 0, -1]))).eval({"x": 2.0}) == pytest.approx(complex(0, 3**0.5))
    assert Iv.reciprocal().reciprocal() == Iv
