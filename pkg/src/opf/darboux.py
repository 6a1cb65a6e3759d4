"""Darboux invariants from cofactor relations.

Given invariant curves ``f_i = 0`` with cofactors ``K_i`` (and optionally
exponential factors ``exp(g_j/h_j)`` with cofactors ``L_j``), a relation
``sum l_i K_i + sum m_j L_j = -s`` with ``s != 0`` makes

    I = prod f_i^l_i * prod exp(g_j/h_j)^m_j * exp(s t)

constant along every trajectory.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (InvalidCofactor, IntegrationFailure, PoleAtPoint,
                     TrajectoryLeftDomain)
from .exactpoly import BiPoly, rat, rat_str
from .integrator import HORIZON, LEFT_WINDOW, integrate
from .vfield import QuadSystem, lie_derivative


@dataclass(frozen=True)
class ExpFactor:
    g: BiPoly
    h: BiPoly
    L: BiPoly


@dataclass
class DarbouxProblem:
    system: QuadSystem
    curves: list[tuple[BiPoly, BiPoly]]
    exp_factors: list[ExpFactor] = field(default_factory=list)

    def validate(self) -> None:
        """Raise :class:`InvalidCofactor` unless every cofactor is exact."""
        for f, K in self.curves:
            if not (lie_derivative(self.system, f) - K * f).is_zero():
                raise InvalidCofactor(f"X({f}) != ({K})*({f})")
        for e in self.exp_factors:
            # X(g/h) = L  <=>  h Xg - g Xh = L h^2
            lhs = e.h * lie_derivative(self.system, e.g) - e.g * lie_derivative(self.system, e.h)
            if not (lhs - e.L * e.h * e.h).is_zero():
                raise InvalidCofactor(f"X(({e.g})/({e.h})) != {e.L}")


@dataclass(frozen=True)
class DarbouxCertificate:
    curves: tuple[BiPoly, ...]
    cofactors: tuple[BiPoly, ...]
    lambdas: tuple[Fraction, ...]
    s: Fraction
    exp_factors: tuple[ExpFactor, ...] = ()
    mus: tuple[Fraction, ...] = ()
    nullspace: tuple[tuple[Fraction, ...], ...] = ()

    def __post_init__(self):
        if self.s == 0:
            raise ValueError("a Darboux invariant needs s != 0")
        if not any(self.lambdas) and not any(self.mus):
            raise ValueError("all exponents are zero")

    def cofactor_sum(self) -> BiPoly:
        """``sum l_i K_i + sum m_j L_j + s``; zero for a valid certificate."""
        acc = BiPoly.const(self.s)
        for lam, K in zip(self.lambdas, self.cofactors):
            acc = acc + K.scale(lam)
        for mu, e in zip(self.mus, self.exp_factors):
            acc = acc + e.L.scale(mu)
        return acc

    def description(self, names=("v", "x")) -> str:
        num, den = [], []
        for lam, f in zip(self.lambdas, self.curves):
            if lam == 0:
                continue
            (num if lam > 0 else den).append(_power_str(f.to_str(names), abs(lam)))
        for mu, e in zip(self.mus, self.exp_factors):
            if mu:
                num.append(f"exp({_coef(mu)}({e.g.to_str(names)})/({e.h.to_str(names)}))")
        head = "*".join(num) if num else "1"
        head += "".join("/" + d for d in den)
        tail = "exp(t)" if self.s == 1 else f"exp({_coef(self.s)}t)"
        return head + "*" + tail if (num or den) else tail

    def to_json(self) -> dict:
        return {
            "curves": [f.to_str() for f in self.curves],
            "cofactors": [K.to_str() for K in self.cofactors],
            "lambdas": [rat_str(c) for c in self.lambdas],
            "mus": [rat_str(c) for c in self.mus],
            "s": rat_str(self.s),
            "invariant": self.description(),
            "nullspace": [[rat_str(c) for c in vec] for vec in self.nullspace],
        }


def _coef(c: Fraction) -> str:
    if c == 1:
        return ""
    if c == -1:
        return "-"
    return f"({rat_str(c)})*"


def _power_str(base: str, e: Fraction) -> str:
    if e == 1:
        return f"({base})"
    if e == Fraction(1, 2):
        return f"sqrt({base})"
    return f"({base})^({rat_str(e)})"


def _rref_solve(rows: list[list[Fraction]], rhs: list[Fraction], nvars: int):
    """Exact Gauss-Jordan; returns (particular solution or None, nullspace basis)."""
    M = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for c in range(nvars):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        M[r] = [a / p for a in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                fac = M[i][c]
                M[i] = [a - fac * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    for row in M[r:]:
        if row[-1] != 0:
            return None, []
    sol = [Fraction(0)] * nvars
    for i, c in enumerate(pivots):
        sol[c] = M[i][-1]
    basis = []
    for free in (c for c in range(nvars) if c not in pivots):
        vec = [Fraction(0)] * nvars
        vec[free] = Fraction(1)
        for i, c in enumerate(pivots):
            vec[c] = -M[i][free]
        basis.append(tuple(vec))
    return sol, basis


def solve_cofactor_relation(problem: DarbouxProblem, s=1) -> DarbouxCertificate | None:
    """Solve ``sum l_i K_i + sum m_j L_j = -s`` coefficient-wise over Q.

    Returns ``None`` when no solution exists.  An underdetermined system yields
    the solution with all free unknowns set to zero; the nullspace basis is
    attached to the certificate.
    """
    s = rat(s)
    if s == 0:
        raise ValueError("s must be nonzero")
    problem.validate()
    cofs = [K for _, K in problem.curves] + [e.L for e in problem.exp_factors]
    monos = sorted({m for K in cofs for m in K.terms} | {(0, 0)})
    rows = [[K.coeff(*m) for K in cofs] for m in monos]
    rhs = [-s if m == (0, 0) else Fraction(0) for m in monos]
    sol, basis = _rref_solve(rows, rhs, len(cofs))
    if sol is None:
        return None
    p = len(problem.curves)
    return DarbouxCertificate(
        curves=tuple(f for f, _ in problem.curves),
        cofactors=tuple(K for _, K in problem.curves),
        lambdas=tuple(sol[:p]),
        s=s,
        exp_factors=tuple(problem.exp_factors),
        mus=tuple(sol[p:]),
        nullspace=tuple(basis),
    )


def invariant_lines(sys: QuadSystem) -> list[tuple[BiPoly, BiPoly]]:
    """Invariant lines ``x = c`` at rational roots ``c`` of ``Q``, with cofactors.

    Only applies when ``Q`` depends on ``x`` alone; returns an empty list otherwise.
    """
    if sys.Q.is_zero() or sys.Q.degree_in("v") > 0:
        return []
    from .exactpoly import rational_roots  # local: avoid widening the public namespace

    q = sys.Q.as_uni("x")
    if q.degree <= 0:
        return []
    out = []
    for c in rational_roots(q):
        f = BiPoly.x() - c
        K, r = lie_derivative(sys, f).divmod_lex(f)
        if r.is_zero():
            out.append((f, K))
    return out


def invariant_value(cert: DarbouxCertificate, v: float, x: float, t: float):
    """Numeric value of the invariant (principal branch; complex if needed)."""
    val = complex(math.exp(float(cert.s) * t))
    for lam, f in zip(cert.lambdas, cert.curves):
        if lam == 0:
            continue
        fv = f.eval_float(v, x)
        if fv == 0:
            if lam < 0:
                raise PoleAtPoint(f"curve {f} vanishes at ({v}, {x})")
            return 0.0
        if lam.denominator == 1:
            val *= fv ** int(lam)
        else:
            val *= cmath.exp(float(lam) * cmath.log(complex(fv)))
    for mu, e in zip(cert.mus, cert.exp_factors):
        if mu == 0:
            continue
        hv = e.h.eval_float(v, x)
        if hv == 0:
            raise PoleAtPoint(f"exponential factor denominator vanishes at ({v}, {x})")
        val *= math.exp(float(mu) * e.g.eval_float(v, x) / hv)
    if val.imag == 0:
        return val.real
    return val


@dataclass
class FlowCheck:
    max_drift: float
    samples: int
    tol: float
    relative: bool

    @property
    def passed(self) -> bool:
        return self.max_drift < self.tol

    def to_json(self) -> dict:
        return {"max_drift": float(f"{self.max_drift:.17g}"), "samples": self.samples,
                "tol": self.tol, "relative": self.relative, "passed": self.passed}


def drift_along(values: np.ndarray) -> tuple[float, bool]:
    """Max relative deviation from the first value (absolute if that is zero)."""
    values = np.abs(np.asarray(values))
    ref = values[0]
    if ref == 0:
        return float(np.max(values)), False
    return float(np.max(np.abs(values - ref)) / ref), True


def check_invariant_along_flow(cert: DarbouxCertificate, sys: QuadSystem, start, T: float = 1.0,
                               tol: float = 1e-6, rtol: float = 1e-10, samples: int = 100) -> FlowCheck:
    """Integrate from ``start`` and measure the drift of ``|I(v(t), x(t), t)|``.

    The modulus sidesteps branch choices for fractional powers of negative
    factors.  The step is capped at ``T/samples`` so at least ``samples``
    accepted steps are examined.
    """
    traj = integrate(sys, start, T, tol=rtol, max_step=abs(T) / samples, strict=False,
                     bound=1e8)
    if traj.reason == LEFT_WINDOW:
        raise TrajectoryLeftDomain(f"trajectory from {start} escaped to infinity")
    if traj.reason != HORIZON:
        raise IntegrationFailure(f"integration from {start} stopped: {traj.reason}")
    vals = []
    for t, v, x in traj.samples:
        try:
            vals.append(abs(invariant_value(cert, v, x, t)))
        except PoleAtPoint as exc:
            raise TrajectoryLeftDomain(str(exc)) from None
    drift, relative = drift_along(np.array(vals))
    return FlowCheck(drift, len(vals), tol, relative)
