"""Planar polynomial systems ``v' = P(v, x)``, ``x' = Q(v, x)``.

Builders for the family systems and the two parametric shapes, the Riccati
foliation ``dv/dx = P/Q``, Lie derivatives and exact invariant-curve checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import DegenerateQ, NonpositiveLambda, ZeroMu
from .exactpoly import BiPoly, UniPoly, parse_bipoly, rat, rat_str, uni_gcd
from .families import FamilySpec, lambda_n, poly_of


@dataclass(frozen=True)
class QuadSystem:
    """``v' = P``, ``x' = Q``.

    ``names`` only affects printing; chart systems use e.g. ``("v", "z")``.
    """

    P: BiPoly
    Q: BiPoly
    provenance: dict = field(default_factory=dict, compare=False, hash=False)
    names: tuple[str, str] = field(default=("v", "x"), compare=False)

    @property
    def degree(self) -> int:
        d = max(self.P.total_degree, self.Q.total_degree)
        return int(d) if d >= 0 else 0

    def rhs(self):
        """Float right-hand side ``f(y) -> (P, Q)`` for integrators."""
        fp, fq = self.P.lambdify(), self.Q.lambdify()

        def f(y):
            return np.array([fp(y[0], y[1]), fq(y[0], y[1])])

        return f

    def scaled(self, c) -> "QuadSystem":
        c = rat(c)
        return QuadSystem(self.P.scale(c), self.Q.scale(c), dict(self.provenance), self.names)

    def to_json(self) -> dict:
        return {
            "P": self.P.to_str(self.names),
            "Q": self.Q.to_str(self.names),
            "degree": self.degree,
            "vars": list(self.names),
            "provenance": {k: (rat_str(v) if isinstance(v, Fraction) else v)
                           for k, v in self.provenance.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "QuadSystem":
        names = tuple(data.get("vars", ("v", "x")))
        prov = dict(data.get("provenance") or {})
        return cls(parse_bipoly(str(data["P"]), names), parse_bipoly(str(data["Q"]), names), prov, names)

    def __str__(self):
        a, b = self.names
        return f"{a}' = {self.P.to_str(self.names)}, {b}' = {self.Q.to_str(self.names)}"


def _check_mu(mu) -> Fraction:
    mu = rat(mu)
    if mu == 0:
        raise ZeroMu("mu must be nonzero for a quadratic system")
    return mu


def build_family_system(spec: FamilySpec, n: int, mu) -> QuadSystem:
    """``v' = (lambda_n/mu) rho + (rho' - tau) v + mu v^2``, ``x' = rho``."""
    mu = _check_mu(mu)
    lam = lambda_n(spec, n)
    rho = BiPoly.from_uni(spec.rho)
    lin = BiPoly.from_uni(spec.rho.diff() - spec.tau)
    v = BiPoly.v()
    P = rho.scale(lam / mu) + lin * v + (v * v).scale(mu)
    prov = {"family": spec.id.value, "n": n, "mu": mu, "lambda": lam}
    prov.update(spec.params)
    return QuadSystem(P, rho, prov)


def _check_lambda(lam) -> Fraction:
    lam = rat(lam)
    if lam <= 0:
        raise NonpositiveLambda("lambda_n must be positive")
    return lam


def build_parametric_a(lam, mu, a, b=0) -> QuadSystem:
    """``v' = (lam/mu)(1-x^2) + a v x + b v + mu v^2``, ``x' = 1-x^2``.

    ``b = 0`` is the four-critical-point shape covering Jacobi-type families;
    ``b != 0`` adds the extra linear ``v`` term of the Darboux example.
    """
    lam, mu, a, b = _check_lambda(lam), _check_mu(mu), rat(a), rat(b)
    v, x = BiPoly.v(), BiPoly.x()
    rho = 1 - x * x
    P = rho.scale(lam / mu) + (v * x).scale(a) + v.scale(b) + (v * v).scale(mu)
    return QuadSystem(P, rho, {"shape": "A", "lambda": lam, "mu": mu, "a": a, "b": b})


def build_parametric_b(lam, mu, a, b) -> QuadSystem:
    """``v' = (lam/mu) x + a v + b v x + mu v^2``, ``x' = x`` (Laguerre-type shape)."""
    lam, mu, a, b = _check_lambda(lam), _check_mu(mu), rat(a), rat(b)
    v, x = BiPoly.v(), BiPoly.x()
    P = x.scale(lam / mu) + v.scale(a) + (v * x).scale(b) + (v * v).scale(mu)
    return QuadSystem(P, x, {"shape": "B", "lambda": lam, "mu": mu, "a": a, "b": b})


def foliation(sys: QuadSystem) -> tuple[BiPoly, BiPoly]:
    """Numerator and denominator of ``dv/dx = P/Q`` with common factors removed.

    Common factors are detected when ``Q`` depends on ``x`` only (then any
    common factor is a polynomial in ``x``) or when ``P`` is a constant
    multiple of ``Q``.  A constant denominator is normalized to 1.
    """
    P, Q = sys.P, sys.Q
    if Q.is_zero():
        raise DegenerateQ("Q vanishes identically")
    if Q.degree_in("v") <= 0:
        g = Q.as_uni("x")
        for c in P.coeffs_in_v():
            g = uni_gcd(g, c)
        if g.degree > 0:
            P = _div_by_uni(P, g)
            Q = _div_by_uni(Q, g)
    else:
        lm = Q.leading_monomial()
        c = P.coeff(*lm) / Q.terms[lm]
        if P == Q.scale(c):
            return BiPoly.const(c), BiPoly.const(1)
    if Q.total_degree == 0:
        c = Q.coeff(0, 0)
        P, Q = P.scale(1 / c), BiPoly.const(1)
    return P, Q


def _div_by_uni(p: BiPoly, g: UniPoly) -> BiPoly:
    q, r = p.divmod_lex(BiPoly.from_uni(g))
    assert r.is_zero()
    return q


@dataclass(frozen=True)
class InvariantCurve:
    f: BiPoly
    cofactor: BiPoly


def lie_derivative(sys: QuadSystem, f: BiPoly) -> BiPoly:
    """``X f = P df/dv + Q df/dx``."""
    return sys.P * f.diff("v") + sys.Q * f.diff("x")


class InvarianceCheck(NamedTuple):
    cofactor: BiPoly | None
    remainder: BiPoly

    @property
    def exact(self) -> bool:
        return self.cofactor is not None


def verify_invariant(sys: QuadSystem, f: BiPoly) -> InvarianceCheck:
    """Divide ``Xf`` by ``f`` (lex ``v > x``); invariant iff the remainder vanishes.

    A single-divisor division has zero remainder exactly when ``f`` divides
    ``Xf``, so no fallback is needed when ``f`` is nonlinear in ``v``.
    """
    if f.is_zero():
        raise ValueError("f must be a nonzero polynomial")
    q, r = lie_derivative(sys, f).divmod_lex(f)
    return InvarianceCheck(q if r.is_zero() else None, r)


def invariant_curve(spec: FamilySpec, n: int, mu) -> InvariantCurve:
    """``f = mu v P_n + rho P_n'`` with cofactor ``rho' + mu v - tau``.

    The identity ``Xf = K f`` is checked exactly before returning.
    """
    mu = _check_mu(mu)
    op = poly_of(spec, n)
    v = BiPoly.v()
    f = v * BiPoly.from_uni(op.poly).scale(mu) + BiPoly.from_uni(spec.rho * op.derivative)
    K = BiPoly.from_uni(spec.rho.diff() - spec.tau) + v.scale(mu)
    sys = build_family_system(spec, n, mu)
    if not (lie_derivative(sys, f) - K * f).is_zero():
        raise AssertionError(f"invariant-curve identity failed for {spec.id.value}, n={n}, mu={mu}")
    return InvariantCurve(f, K)


def jacobian_symbolic(sys: QuadSystem) -> tuple[tuple[BiPoly, BiPoly], tuple[BiPoly, BiPoly]]:
    return ((sys.P.diff("v"), sys.P.diff("x")), (sys.Q.diff("v"), sys.Q.diff("x")))


def jacobian_exact(sys: QuadSystem, v0, x0) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    J = jacobian_symbolic(sys)
    return tuple(tuple(e.eval_rat(v0, x0) for e in row) for row in J)


def jacobian(sys: QuadSystem, at) -> np.ndarray:
    J = jacobian_symbolic(sys)
    v0, x0 = float(at[0]), float(at[1])
    return np.array([[e.eval_float(v0, x0) for e in row] for row in J], dtype=float)
