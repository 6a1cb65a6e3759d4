"""Riccati/linear transformations and the Chebyshev first integrals.

For a family instance the foliation ``dv/dx = c0 + c1 v + c2 v^2`` has
``c0 = lam/mu``, ``c1 = (rho' - tau)/rho``, ``c2 = mu/rho``; ``w = mu v`` and
``w = -rho y'/y`` turn it into ``rho y'' + tau y' + lam y = 0``.

For Chebyshev ``T_n`` the normal form ``z'' = q(x) z`` has the solutions
``T_n rho^(1/4)`` and ``U_(n-1) rho^(3/4)``; their logarithmic derivatives
``w1``, ``w2`` give the first integral

    I(w, x) = (-w + w2) / (-w + w1) * (U_(n-1)/T_n) * sqrt(rho)

of ``w' = q - w^2``, which the map ``w = -x/(2 rho) - mu v/rho`` carries to
``I(v, x) = (rho U' + U (mu v - x)) / (rho T' + mu T v) * sqrt(rho)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .darboux import drift_along
from .errors import (DegenerateC2, IntegrationFailure, PoleAtPoint, SingularAtPMOne,
                     SingularSamplePoint, TrajectoryLeftDomain, ZeroMu)
from .exactpoly import BiPoly, UniPoly, rat, rat_str
from .families import Family, FamilySpec, family, lambda_n, poly_of
from .integrator import HORIZON, LEFT_WINDOW, integrate
from .vfield import QuadSystem, build_family_system

RHO = UniPoly([1, 0, -1])


# ---------------------------------------------------------------------------
# Riccati <-> linear
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatFunc:
    num: UniPoly
    den: UniPoly

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("zero denominator")

    def eval(self, x0):
        d = self.den.eval_float(x0) if not isinstance(x0, Fraction) else self.den.eval_rat(x0)
        if d == 0:
            raise PoleAtPoint(f"pole at x = {x0}")
        n = self.num.eval_float(x0) if not isinstance(x0, Fraction) else self.num.eval_rat(x0)
        return n / d

    def equals(self, other: "RatFunc") -> bool:
        return (self.num * other.den - other.num * self.den).is_zero()

    def to_str(self) -> str:
        if self.den == UniPoly.const(1):
            return self.num.to_str()
        return f"({self.num.to_str()})/({self.den.to_str()})"


@dataclass(frozen=True)
class RiccatiForm:
    """``dv/dx = c0 + c1 v + c2 v^2``."""

    c0: RatFunc
    c1: RatFunc
    c2: RatFunc


@dataclass(frozen=True)
class LinearForm:
    """``rho y'' + tau y' + lam y = 0`` together with the scaling ``w = mu v``."""

    rho: UniPoly
    tau: UniPoly
    lam: Fraction
    mu: Fraction


def riccati_form(spec: FamilySpec, n: int, mu) -> RiccatiForm:
    return linear_to_riccati(LinearForm(spec.rho, spec.tau, lambda_n(spec, n), rat(mu)))


def linear_to_riccati(lin: LinearForm) -> RiccatiForm:
    if lin.mu == 0:
        raise ZeroMu("mu must be nonzero")
    one = UniPoly.const(1)
    return RiccatiForm(RatFunc(UniPoly.const(lin.lam / lin.mu), one),
                       RatFunc(lin.rho.diff() - lin.tau, lin.rho),
                       RatFunc(UniPoly.const(lin.mu), lin.rho))


def riccati_to_linear(r: RiccatiForm) -> LinearForm:
    """Recover ``(rho, tau, lam)`` and ``mu`` from a family-shaped Riccati form.

    ``c2 = mu/rho`` must have a constant numerator; ``c0`` must be constant and
    ``c1 rho`` a polynomial.
    """
    if r.c2.num.is_zero():
        raise DegenerateC2("c2 vanishes: the equation is linear, not Riccati")
    if r.c2.num.degree != 0:
        raise DegenerateC2("c2 must have the shape mu/rho with constant mu")
    mu = r.c2.num[0]
    rho = r.c2.den
    if r.c0.num.degree > 0 or r.c0.den.degree > 0:
        raise DegenerateC2("c0 must be constant")
    lam = (r.c0.num[0] / r.c0.den[0] if not r.c0.num.is_zero() else Fraction(0)) * mu
    c1rho, rem = (r.c1.num * rho).divmod(r.c1.den)
    if not rem.is_zero():
        raise DegenerateC2("c1 * rho is not a polynomial")
    return LinearForm(rho, rho.diff() - c1rho, lam, mu)


# ---------------------------------------------------------------------------
# reduced equation and the solution pair
# ---------------------------------------------------------------------------

def reduced_equation(n: int) -> RatFunc:
    """``q(x) = (-2 - 4 lam + (4 lam - 1) x^2) / (4 (1 - x^2)^2)`` with ``lam = n^2``."""
    lam = Fraction(n * n)
    return RatFunc(UniPoly([-2 - 4 * lam, 0, 4 * lam - 1]), RHO * RHO * 4)


@dataclass(frozen=True)
class SolutionResidual:
    exact_T: UniPoly
    max_residual_T: float
    max_residual_U: float

    @property
    def exact_zero(self) -> bool:
        return self.exact_T.is_zero()


def chebyshev_solutions_residual(n: int, sample_pts) -> SolutionResidual:
    """Residuals of ``T_n`` and ``U_(n-1) sqrt(1 - x^2)`` in the Chebyshev equation.

    The ``T_n`` residual is an exact polynomial identity; the second solution
    is checked at ``sample_pts`` (complex square root outside ``[-1, 1]``).
    """
    if n < 1:
        raise ValueError("n must be positive")
    T = poly_of(family(Family.CHEBYSHEV_T), n).poly
    U = poly_of(family(Family.CHEBYSHEV_U), n - 1).poly
    lam = n * n
    exact = RHO * T.diff().diff() - UniPoly.x() * T.diff() + T * lam
    rT = rU = 0.0
    U1, U2 = U.diff(), U.diff().diff()
    for x0 in sample_pts:
        x0 = float(x0)
        if abs(abs(x0) - 1.0) < 1e-12:
            raise SingularSamplePoint(f"x = {x0} is a singular point of the equation")
        rT = max(rT, abs(exact.eval_float(x0)))
        s = cmath.sqrt(1 - x0 * x0)
        ds, d2s = -x0 / s, -1 / s ** 3
        u, du, d2u = U.eval_float(x0), U1.eval_float(x0), U2.eval_float(x0)
        y, dy = u * s, du * s + u * ds
        d2y = d2u * s + 2 * du * ds + u * d2s
        rU = max(rU, abs((1 - x0 * x0) * d2y - x0 * dy + lam * y))
    return SolutionResidual(exact, rT, rU)


# ---------------------------------------------------------------------------
# expression trees
# ---------------------------------------------------------------------------

class Expr:
    """Small closed-form expression tree over named variables."""

    def eval(self, env: Mapping[str, object]):
        raise NotImplementedError

    def substitute(self, name: str, repl: "Expr") -> "Expr":
        raise NotImplementedError

    def variables(self) -> set[str]:
        raise NotImplementedError

    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Add(self, Neg(_lift(other)))

    def __rsub__(self, other):
        return Add(_lift(other), Neg(self))

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __truediv__(self, other):
        return Div(self, _lift(other))

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return self.to_str()


def _lift(e) -> Expr:
    return e if isinstance(e, Expr) else Const(rat(e))


@dataclass(frozen=True, eq=False)
class Const(Expr):
    value: Fraction

    def eval(self, env):
        return self.value

    def substitute(self, name, repl):
        return self

    def variables(self):
        return set()

    def to_str(self):
        return rat_str(self.value)


@dataclass(frozen=True, eq=False)
class Var(Expr):
    name: str

    def eval(self, env):
        return env[self.name]

    def substitute(self, name, repl):
        return repl if name == self.name else self

    def variables(self):
        return {self.name}

    def to_str(self):
        return self.name


@dataclass(frozen=True, eq=False)
class Poly(Expr):
    """A named univariate polynomial such as ``T_3`` evaluated at ``var``."""

    label: str
    p: UniPoly
    var: str = "x"

    def eval(self, env):
        x0 = env[self.var]
        return self.p.eval_rat(x0) if isinstance(x0, Fraction) else self.p.eval_float(x0)

    def substitute(self, name, repl):
        if name == self.var:
            raise NotImplementedError("substituting into a polynomial argument")
        return self

    def variables(self):
        return {self.var}

    def to_str(self):
        return self.label


@dataclass(frozen=True, eq=False)
class Add(Expr):
    a: Expr
    b: Expr

    def eval(self, env):
        return self.a.eval(env) + self.b.eval(env)

    def substitute(self, name, repl):
        return Add(self.a.substitute(name, repl), self.b.substitute(name, repl))

    def variables(self):
        return self.a.variables() | self.b.variables()

    def to_str(self):
        if isinstance(self.b, Neg):
            return f"{self.a.to_str()} - {_paren(self.b.a, (Add,))}"
        return f"{self.a.to_str()} + {self.b.to_str()}"


@dataclass(frozen=True, eq=False)
class Neg(Expr):
    a: Expr

    def eval(self, env):
        return -self.a.eval(env)

    def substitute(self, name, repl):
        return Neg(self.a.substitute(name, repl))

    def variables(self):
        return self.a.variables()

    def to_str(self):
        return "-" + _paren(self.a, (Add,))


@dataclass(frozen=True, eq=False)
class Mul(Expr):
    a: Expr
    b: Expr

    def eval(self, env):
        return self.a.eval(env) * self.b.eval(env)

    def substitute(self, name, repl):
        return Mul(self.a.substitute(name, repl), self.b.substitute(name, repl))

    def variables(self):
        return self.a.variables() | self.b.variables()

    def to_str(self):
        rhs = _paren(self.b, (Add, Div))
        if isinstance(self.a, Const) and abs(self.a.value) == 1:
            return rhs if self.a.value == 1 else "-" + rhs
        if rhs.startswith("-"):
            rhs = f"({rhs})"
        return f"{_paren(self.a, (Add, Div))}*{rhs}"


@dataclass(frozen=True, eq=False)
class Div(Expr):
    a: Expr
    b: Expr

    def eval(self, env):
        d = self.b.eval(env)
        if d == 0:
            raise PoleAtPoint(f"denominator {self.b.to_str()} vanishes")
        return self.a.eval(env) / d

    def substitute(self, name, repl):
        return Div(self.a.substitute(name, repl), self.b.substitute(name, repl))

    def variables(self):
        return self.a.variables() | self.b.variables()

    def to_str(self):
        return f"{_paren(self.a, (Add, Div))}/{_paren(self.b, (Add, Mul, Div, Neg))}"


@dataclass(frozen=True, eq=False)
class Sqrt(Expr):
    """Principal square root; exact for rational squares, complex for negative floats."""

    a: Expr

    def eval(self, env):
        val = self.a.eval(env)
        if isinstance(val, Fraction) and val >= 0:
            n, d = math.isqrt(val.numerator), math.isqrt(val.denominator)
            if n * n == val.numerator and d * d == val.denominator:
                return Fraction(n, d)
        if isinstance(val, complex) or val < 0:
            return cmath.sqrt(complex(val))
        return math.sqrt(val)

    def substitute(self, name, repl):
        return Sqrt(self.a.substitute(name, repl))

    def variables(self):
        return self.a.variables()

    def to_str(self):
        s = self.a.to_str()
        if isinstance(self.a, Poly) and s.startswith("(") and s.endswith(")"):
            s = s[1:-1]
        return f"sqrt({s})"


def _paren(e: Expr, kinds) -> str:
    s = e.to_str()
    return f"({s})" if isinstance(e, kinds) else s


@dataclass(frozen=True)
class FirstIntegralExpr:
    """``I = numerator / denominator`` in the dependent variable ``var`` and ``x``."""

    numerator: Expr
    denominator: Expr
    var: str
    n: int
    mu: Fraction | None = None

    @property
    def expr(self) -> Expr:
        return Div(self.numerator, self.denominator)

    def __call__(self, value, x):
        return self.expr.eval({self.var: value, "x": x})

    def reciprocal(self) -> "FirstIntegralExpr":
        return FirstIntegralExpr(self.denominator, self.numerator, self.var, self.n, self.mu)

    def to_str(self) -> str:
        return self.expr.to_str()

    __str__ = to_str


def _cheb_pieces(n: int):
    if n < 1:
        raise ValueError("n must be positive")
    T = poly_of(family(Family.CHEBYSHEV_T), n).poly
    U = poly_of(family(Family.CHEBYSHEV_U), n - 1).poly
    x = Var("x")
    rho = Poly("(1-x^2)", RHO)
    return (Poly(f"T{n}", T), Poly(f"T{n}'", T.diff()),
            Poly(f"U{n - 1}", U), Poly(f"U{n - 1}'", U.diff()), rho, x)


def first_integral_w(n: int) -> FirstIntegralExpr:
    """``(-w + U'/U - 3x/(2 rho)) / (-w + T'/T - x/(2 rho)) * (U/T) sqrt(rho)``."""
    T, dT, U, dU, rho, x = _cheb_pieces(n)
    w = Var("w")
    w2 = dU / U - Const(Fraction(3, 2)) * x / rho
    w1 = dT / T - Const(Fraction(1, 2)) * x / rho
    num = (w2 - w) * U * Sqrt(rho)
    den = (w1 - w) * T
    return FirstIntegralExpr(num, den, "w", n)


def first_integral_v(n: int, mu) -> FirstIntegralExpr:
    """``(rho U' + U (mu v - x)) / (rho T' + mu T v) * sqrt(rho)``."""
    mu = rat(mu)
    if mu == 0:
        raise ZeroMu("mu must be nonzero")
    T, dT, U, dU, rho, x = _cheb_pieces(n)
    v = Var("v")
    mv = v if mu == 1 else Const(mu) * v
    num = (rho * dU + U * (mv - x)) * Sqrt(rho)
    den = rho * dT + T * mv
    return FirstIntegralExpr(num, den, "v", n, mu)


@dataclass(frozen=True)
class BridgeWV:
    """``w = -x/(2 rho) - mu v/rho`` and its inverse ``v = -(rho w)/mu - x/(2 mu)``."""

    mu: Fraction

    def _rho(self, x):
        r = 1 - x * x
        if r == 0:
            raise SingularAtPMOne("the bridge map is singular at x = +-1")
        return r

    def _mu_for(self, *vals):
        return self.mu if all(isinstance(c, Fraction) for c in vals) else float(self.mu)

    def forward(self, v, x):
        r = self._rho(x)
        return -x / (2 * r) - self._mu_for(v, x) * v / r

    def inverse(self, w, x):
        r = self._rho(x)
        mu = self._mu_for(w, x)
        return -r * w / mu - x / (2 * mu)

    def expr(self) -> Expr:
        """``w`` as an expression in ``v`` and ``x``, for substitution into the w-form."""
        rho = Poly("(1-x^2)", RHO)
        return -(Const(Fraction(1, 2)) * Var("x") / rho) - Const(self.mu) * Var("v") / rho


def bridge_wv(mu) -> BridgeWV:
    mu = rat(mu)
    if mu == 0:
        raise ZeroMu("mu must be nonzero")
    return BridgeWV(mu)


def bridge_roundtrip_error(mu, points) -> float:
    br = bridge_wv(mu)
    err = 0.0
    for v, x in points:
        back = br.inverse(br.forward(v, x), x)
        err = max(err, abs(back - v) / max(1.0, abs(v)))
    return err


def chebyshev_system(n: int, mu) -> QuadSystem:
    """``v' = (n^2/mu)(1-x^2) - x v + mu v^2``, ``x' = 1 - x^2``."""
    return build_family_system(family(Family.CHEBYSHEV_T), n, mu)


def reduced_system(n: int) -> QuadSystem:
    """Polynomial carrier of ``dw/dx = q - w^2``: ``w' = N - D w^2``, ``x' = D``.

    ``q = N/D``; only the orbits matter, so the time rescaling by ``D`` is harmless.
    """
    q = reduced_equation(n)
    N, D = BiPoly.from_uni(q.num), BiPoly.from_uni(q.den)
    w = BiPoly.v()
    return QuadSystem(N - D * w * w, D, {"reduced": n}, ("w", "x"))


@dataclass
class IntegralCheck:
    max_drift: float
    samples: int
    reciprocal: bool
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_drift < self.tol

    def to_json(self) -> dict:
        return {"max_drift": float(f"{self.max_drift:.17g}"), "samples": self.samples,
                "reciprocal": self.reciprocal, "tol": self.tol, "passed": self.passed}


POLE_THRESHOLD = 1e-8


def check_first_integral_flow(expr: FirstIntegralExpr, sys: QuadSystem, starts, T: float = 0.5,
                              tol: float = 1e-6, rtol: float = 1e-11,
                              samples: int = 100) -> IntegralCheck:
    """Drift of ``|I|`` along trajectories from each start.

    If ``|denominator|`` falls below ``1e-8`` anywhere on a trajectory, the
    reciprocal ``1/I`` is tracked instead (also a first integral).
    """
    worst, count, recip_any = 0.0, 0, False
    for start in starts:
        traj = integrate(sys, start, T, tol=rtol, max_step=abs(T) / samples, strict=False, bound=1e8)
        if traj.reason == LEFT_WINDOW:
            raise TrajectoryLeftDomain(f"trajectory from {start} escaped")
        if traj.reason != HORIZON:
            raise IntegrationFailure(f"trajectory from {start} stopped: {traj.reason}")
        pts = traj.points
        if np.any(np.abs(np.abs(pts[:, 1]) - 1.0) < 1e-12):
            raise TrajectoryLeftDomain("trajectory reached x = +-1")
        nums, dens = [], []
        for val, x in pts:
            env = {expr.var: float(val), "x": float(x)}
            nums.append(complex(expr.numerator.eval(env)))
            dens.append(complex(expr.denominator.eval(env)))
        nums, dens = np.array(nums), np.array(dens)
        recip = bool(np.min(np.abs(dens)) < POLE_THRESHOLD)
        top, bottom = (dens, nums) if recip else (nums, dens)
        if np.any(bottom == 0):
            raise PoleAtPoint("both forms of the integral are singular on this trajectory")
        drift, _ = drift_along(np.abs(top / bottom))
        worst = max(worst, drift)
        count += len(pts)
        recip_any |= recip
    return IntegralCheck(worst, count, recip_any, tol)


def w_v_agreement(n: int, mu, points) -> float:
    """Max relative gap between the v-form and the bridged w-form at ``points``."""
    Iv = first_integral_v(n, mu)
    Iw = first_integral_w(n)
    composed = Iw.expr.substitute("w", bridge_wv(mu).expr())
    err = 0.0
    for v, x in points:
        a = complex(Iv(v, x))
        b = complex(composed.eval({"v": v, "x": x}))
        err = max(err, abs(a - b) / max(1.0, abs(a)))
    return err
