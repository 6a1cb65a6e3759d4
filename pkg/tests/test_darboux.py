from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from opf.darboux import (DarbouxProblem, ExpFactor, check_invariant_along_flow, drift_along,
                         invariant_lines, invariant_value, solve_cofactor_relation)
from opf.errors import InvalidCofactor, PoleAtPoint, TrajectoryLeftDomain
from opf.exactpoly import BiPoly, parse_bipoly
from opf.vfield import QuadSystem, build_parametric_a, lie_derivative

HALF = Fraction(1, 2)


@pytest.fixture
def darboux_system():
    return build_parametric_a(2, 1, 0)


def test_lines_of_the_jacobi_shape(darboux_system):
    lines = invariant_lines(darboux_system)
    assert [f for f, _ in lines] == [parse_bipoly("x + 1"), parse_bipoly("x - 1")]
    assert [K for _, K in lines] == [parse_bipoly("1 - x"), parse_bipoly("-1 - x")]


def test_exponents_are_minus_half_and_half(darboux_system):
    cert = solve_cofactor_relation(DarbouxProblem(darboux_system, invariant_lines(darboux_system)), 1)
    assert cert.lambdas == (-HALF, HALF)
    assert cert.cofactor_sum().is_zero()
    assert cert.nullspace == ()
    assert cert.description() == "sqrt(x-1)/sqrt(x+1)*exp(t)"


def test_invariant_is_constant_symbolically():
    # sympy oracle: d/dt log I = X(log I) + s = 0 for I = (x-1)^(1/2)(x+1)^(-1/2)e^t
    v, x = sp.symbols("v x")
    log_i = sp.log(x - 1) / 2 - sp.log(x + 1) / 2
    Q = 1 - x**2
    assert sp.simplify(Q * sp.diff(log_i, x) + 1) == 0


@given(st.fractions(min_value=-4, max_value=4, max_denominator=5).filter(bool))
def test_exponents_scale_with_s(s):
    sys = build_parametric_a(2, 1, 0)
    cert = solve_cofactor_relation(DarbouxProblem(sys, invariant_lines(sys)), s)
    assert cert.lambdas == (-s / 2, s / 2)
    assert cert.cofactor_sum().is_zero()


def test_infeasible_relation_returns_none():
    v, x = BiPoly.v(), BiPoly.x()
    sys = QuadSystem(v * x, x * x)
    # f = x with cofactor x: l*x = -1 has no solution
    assert solve_cofactor_relation(DarbouxProblem(sys, [(x, x)]), 1) is None


def test_underdetermined_relation_fixes_free_unknowns():
    v, x = BiPoly.v(), BiPoly.x()
    sys = QuadSystem(v, BiPoly.const(1))
    # f = v has cofactor 1; exp(x) has cofactor X(x) = 1
    prob = DarbouxProblem(sys, [(v, BiPoly.const(1))], [ExpFactor(x, BiPoly.const(1), BiPoly.const(1))])
    cert = solve_cofactor_relation(prob, 1)
    assert cert.lambdas == (-1,) and cert.mus == (0,)
    assert len(cert.nullspace) == 1
    a, b = cert.nullspace[0]
    assert a + b == 0 and (a, b) != (0, 0)
    assert cert.cofactor_sum().is_zero()


def test_wrong_cofactor_is_rejected(darboux_system):
    with pytest.raises(InvalidCofactor):
        solve_cofactor_relation(DarbouxProblem(darboux_system, [(parse_bipoly("x-1"), parse_bipoly("x"))]))
    bad = ExpFactor(BiPoly.x(), BiPoly.const(1), BiPoly.const(1))
    with pytest.raises(InvalidCofactor):
        solve_cofactor_relation(DarbouxProblem(darboux_system, [], [bad]))


def test_zero_s_rejected(darboux_system):
    with pytest.raises(ValueError):
        solve_cofactor_relation(DarbouxProblem(darboux_system, invariant_lines(darboux_system)), 0)


def test_invariant_value_branches(darboux_system):
    cert = solve_cofactor_relation(DarbouxProblem(darboux_system, invariant_lines(darboux_system)))
    assert invariant_value(cert, 0.0, 3.0, 0.0) == pytest.approx((2 / 4) ** 0.5)
    assert invariant_value(cert, 0.0, 1.0, 0.0) == 0.0
    with pytest.raises(PoleAtPoint):
        invariant_value(cert, 0.0, -1.0, 0.0)
    inside = invariant_value(cert, 0.0, 0.0, 0.0)
    assert isinstance(inside, complex) and abs(inside) == pytest.approx(1.0)


@pytest.mark.parametrize("start", [(0.1, 2.0), (-3.0, 0.5), (-2.0, -0.2), (0.5, 3.0)])
def test_flow_drift_is_small(darboux_system, start):
    cert = solve_cofactor_relation(DarbouxProblem(darboux_system, invariant_lines(darboux_system)))
    chk = check_invariant_along_flow(cert, darboux_system, start, T=1.0)
    assert chk.passed and chk.max_drift < 1e-6
    assert chk.samples >= 100


def test_flow_check_reports_escape(darboux_system):
    cert = solve_cofactor_relation(DarbouxProblem(darboux_system, invariant_lines(darboux_system)))
    with pytest.raises(TrajectoryLeftDomain):
        check_invariant_along_flow(cert, darboux_system, (5.0, 0.0), T=1.0)


def test_drift_measures():
    assert drift_along(np.array([2.0, 2.0, 2.0 + 2e-9])) == (pytest.approx(1e-9), True)
    d, rel = drift_along(np.array([0.0, 1e-12, -1e-12]))
    assert not rel and d == pytest.approx(1e-12)


def test_exp_factor_cofactor_is_checked_exactly():
    v, x = BiPoly.v(), BiPoly.x()
    sys = QuadSystem(v * x, BiPoly.const(1))
    e = ExpFactor(x * x, BiPoly.const(2), x)  # X(x^2/2) = x
    DarbouxProblem(sys, [], [e]).validate()
    assert lie_derivative(sys, x * x) == x.scale(2)
