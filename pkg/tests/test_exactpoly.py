from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import assume, given, strategies as st

from conftest import bipolys, small_fractions, unipolys
from opf.errors import PreconditionViolated
from opf.exactpoly import (BiPoly, PowerSeries, UniPoly, compose_series, parse_bipoly, rat,
                           rat_str, rational_roots, solve_implicit_series, uni_gcd)

V, X = sp.symbols("v x")


def to_sympy(p: BiPoly):
    return sum((sp.Rational(c.numerator, c.denominator) * V**i * X**j
                for (i, j), c in p.terms.items()), sp.Integer(0))


def uni_sympy(p: UniPoly):
    return sum((sp.Rational(c.numerator, c.denominator) * X**k for k, c in enumerate(p.coeffs)),
               sp.Integer(0))


# -- scalars -------------------------------------------------------------------

@pytest.mark.parametrize("value, expected", [
    ("3/4", Fraction(3, 4)), ("-2", Fraction(-2)), (0.5, Fraction(1, 2)), (7, Fraction(7)),
])
def test_rat_parses(value, expected):
    assert rat(value) == expected


def test_rat_str_round_trips():
    for q in (Fraction(-7, 3), Fraction(0), Fraction(5)):
        assert rat(rat_str(q)) == q
    assert rat_str(Fraction(1, 2)) == "1/2"


# -- univariate ----------------------------------------------------------------

@given(unipolys(), unipolys())
def test_uni_products_match_sympy(a, b):
    assert sp.expand(uni_sympy(a * b) - uni_sympy(a) * uni_sympy(b)) == 0


@given(unipolys(), unipolys())
def test_uni_divmod_reconstructs(a, b):
    assume(not b.is_zero())
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


def test_uni_gcd_and_roots():
    p = UniPoly([-1, 0, 1]) * UniPoly([Fraction(-1, 3), 1])
    g = uni_gcd(p, UniPoly([1, 1]))
    assert g.monic() == UniPoly([1, 1])
    assert sorted(rational_roots(p)) == [-1, Fraction(1, 3), 1]
    roots = UniPoly([-2, 0, 1]).real_roots()
    assert [pytest.approx(float(r)) for r in roots] == [-2**0.5, 2**0.5]


# -- bivariate -----------------------------------------------------------------

@given(bipolys(), bipolys(), bipolys())
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a - a == BiPoly()


@given(bipolys(), bipolys())
def test_products_match_sympy(a, b):
    assert sp.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0


@given(bipolys(), bipolys(max_degree=2, max_terms=3))
def test_lex_division_reconstructs(a, f):
    assume(not f.is_zero())
    q, r = a.divmod_lex(f)
    assert q * f + r == a
    lead = f.leading_monomial()
    # no remainder term is divisible by the leading monomial of f
    assert all(not (i >= lead[0] and j >= lead[1]) for i, j in r.terms)


@given(bipolys(), bipolys(max_degree=2, max_terms=3))
def test_exact_multiple_divides_cleanly(a, f):
    assume(not f.is_zero())
    q, r = (a * f).divmod_lex(f)
    assert r.is_zero() and q == a


@given(bipolys())
def test_to_str_parse_round_trip(p):
    assert parse_bipoly(p.to_str()) == p
    assert parse_bipoly(p.to_str(("u", "z")), ("u", "z")) == p


@given(bipolys(), small_fractions, small_fractions)
def test_eval_and_substitute_agree(p, v0, x0):
    direct = p.eval_rat(v0, x0)
    sub = p.substitute(v=BiPoly.const(v0), x=BiPoly.const(x0))
    assert sub == BiPoly.const(direct)
    assert p.lambdify()(float(v0), float(x0)) == pytest.approx(float(direct), abs=1e-9)


def test_derivatives_and_parts():
    p = parse_bipoly("v^2*x + 3*x - 2")
    assert p.diff("v") == parse_bipoly("2*v*x")
    assert p.diff("x") == parse_bipoly("v^2 + 3")
    assert p.homogeneous_part(3) == parse_bipoly("v^2*x")
    assert p.low_order(2) == parse_bipoly("3*x - 2")
    assert p.total_degree == 3 and p.degree_in("v") == 2


@pytest.mark.parametrize("bad", ["v +", "x^-1", "2*(v", "v/0", "y"])
def test_parse_rejects_garbage(bad):
    with pytest.raises(ValueError):
        parse_bipoly(bad)


# -- series --------------------------------------------------------------------

@given(st.lists(small_fractions, min_size=1, max_size=6), st.lists(small_fractions, min_size=1, max_size=6))
def test_series_product_truncates(a, b):
    n = 5
    prod = PowerSeries(a, n) * PowerSeries(b, n)
    full = UniPoly(a) * UniPoly(b)
    assert list(prod.coeffs) == [full[k] for k in range(n + 1)]


def test_compose_series_matches_sympy():
    B = parse_bipoly("v^2 + v*x - 3*x^3")
    f = PowerSeries([0, 2, -1, Fraction(1, 2)], 6)
    got = compose_series(B, f, "x")
    t = sp.symbols("t")
    fs = 2 * t - t**2 + sp.Rational(1, 2) * t**3
    ref = sp.Poly(sp.expand((t**2 + t * fs - 3 * fs**3)), t)
    assert [got[k] for k in range(7)] == [Fraction(str(ref.coeff_monomial(t**k))) for k in range(7)]


@pytest.mark.parametrize("lam", [1, -2, Fraction(1, 3)])
def test_implicit_series_solves_to_order(lam):
    B = parse_bipoly("v^2 + v*x + x^2")
    order = 10
    f = solve_implicit_series(lam, B, order)
    residual = PowerSeries([0] + [lam * c for c in f.coeffs[1:]], order) + compose_series(B, f, "x")
    assert residual.is_zero()


def test_implicit_series_rejects_linear_terms():
    with pytest.raises(PreconditionViolated):
        solve_implicit_series(1, parse_bipoly("v + x^2"))
    with pytest.raises(PreconditionViolated):
        solve_implicit_series(0, parse_bipoly("v^2"))


def test_series_leading_term():
    assert PowerSeries([0, 0, 0, Fraction(-2)], 6).leading() == (3, Fraction(-2))
    assert PowerSeries([], 6).leading() is None
