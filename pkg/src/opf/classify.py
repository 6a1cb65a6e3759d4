"""Critical points and their local topological type.

Three procedures are combined:

* hyperbolic points are decided by the sign pattern of the eigenvalues,
  computed from the exact trace, determinant and discriminant whenever the
  Jacobian is rational;
* semi-hyperbolic points (one zero eigenvalue) are brought to
  ``X' = A(X, Y)``, ``Y' = lam*Y + B(X, Y)`` and decided by the leading term
  ``a_m X^m`` of ``g(X) = A(X, f(X))``, where ``Y = f(X)`` solves
  ``lam*Y + B(X, Y) = 0``;
* nilpotent points are brought to ``X' = Y + A``, ``Y' = B`` and decided by
  the leading terms ``a X^m`` of ``F = B(X, f(X))`` and ``b X^n`` of
  ``G = (dA/dX + dB/dY)(X, f(X))``, where ``Y = f(X)`` solves ``Y + A = 0``.

All series work happens in exact rational arithmetic on the locally
normalized system, so "first nonzero coefficient" is never a float decision.
"""
from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import (NonIsolatedCritSet, NotACriticalPoint, NotApplicable,
                     PreconditionViolated, RuleUndecided, SeriesInconclusive)
from .exactpoly import (DEFAULT_ORDER, BiPoly, PowerSeries, UniPoly, compose_series,
                        rat, rat_str, solve_implicit_series, uni_gcd)
from .vfield import QuadSystem, jacobian, jacobian_exact

Number = Union[Fraction, float]

MAX_ORDER = 24


class Kind(str, Enum):
    SADDLE = "Saddle"
    NODE_STABLE = "NodeStable"
    NODE_UNSTABLE = "NodeUnstable"
    FOCUS_STABLE = "FocusStable"
    FOCUS_UNSTABLE = "FocusUnstable"
    CENTER_OR_WEAK_FOCUS = "CenterOrWeakFocus"
    SADDLE_NODE = "SaddleNode"
    TOPOLOGICAL_SADDLE = "TopologicalSaddle"
    TOPOLOGICAL_NODE = "TopologicalNode"
    CUSP = "Cusp"
    ELLIPTIC_HYPERBOLIC = "EllipticHyperbolicSector"
    NILPOTENT_NODE = "NilpotentNode"
    DEGENERATE = "Degenerate"


SADDLE_LIKE = frozenset({Kind.SADDLE, Kind.TOPOLOGICAL_SADDLE})
NODE_LIKE = frozenset({Kind.NODE_STABLE, Kind.NODE_UNSTABLE, Kind.TOPOLOGICAL_NODE,
                       Kind.NILPOTENT_NODE})


def series_order(order: int | None = None) -> int:
    """Explicit ``order``, else ``$OPF_SERIES_ORDER``, else the default 12."""
    if order is not None:
        return int(order)
    env = os.environ.get("OPF_SERIES_ORDER")
    if env:
        try:
            val = int(env)
        except ValueError:
            raise PreconditionViolated(f"OPF_SERIES_ORDER must be an integer, got {env!r}") from None
        if val < 2:
            raise PreconditionViolated("OPF_SERIES_ORDER must be at least 2")
        return val
    return DEFAULT_ORDER


@dataclass(frozen=True)
class CritPoint:
    v: Number
    x: Number
    chart: str = "finite"
    exact: bool = True

    @property
    def location(self) -> tuple[Number, Number]:
        return (self.v, self.x)

    def as_float(self) -> tuple[float, float]:
        return (float(self.v), float(self.x))

    def to_json(self) -> list:
        return [_num_json(self.v), _num_json(self.x)]


def _num_json(q):
    if isinstance(q, Fraction):
        return rat_str(q)
    return float(f"{float(q):.17g}")


@dataclass(frozen=True)
class Classification:
    kind: Kind
    evidence: dict = field(default_factory=dict, compare=False, hash=False)
    stability: str | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "evidence": self.evidence}
        if self.stability is not None:
            out["stability"] = self.stability
        return out


@dataclass(frozen=True)
class CritReport:
    point: CritPoint
    classification: Classification
    method: str

    @property
    def kind(self) -> Kind:
        return self.classification.kind

    def to_json(self) -> dict:
        out = {"location": self.point.to_json(), "chart": self.point.chart,
               "kind": self.kind.value, "method": self.method,
               "evidence": self.classification.evidence}
        if self.classification.stability is not None:
            out["stability"] = self.classification.stability
        return out


# ---------------------------------------------------------------------------
# locating finite critical points
# ---------------------------------------------------------------------------

def _x_only(p: BiPoly) -> bool:
    return p.degree_in("v") <= 0


def _v_only(p: BiPoly) -> bool:
    return p.degree_in("x") <= 0


def _uni_at(p: BiPoly, x0: Number, var: str = "v"):
    """Restrict ``p`` to ``x = x0`` (``var='v'``) or ``v = x0`` (``var='x'``)."""
    if isinstance(x0, Fraction):
        sub = p.substitute(x=BiPoly.const(x0)) if var == "v" else p.substitute(v=BiPoly.const(x0))
        return sub.as_uni("v" if var == "v" else "x")
    return None


def _float_roots(coeffs_low_first, tol=1e-9) -> list[float]:
    cs = list(coeffs_low_first)
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) <= 1:
        return []
    out = []
    for z in np.roots(cs[::-1]):
        if abs(z.imag) <= tol * max(1.0, abs(z.real)):
            r = float(z.real)
            if all(abs(r - s) > tol * max(1.0, abs(s)) for s in out):
                out.append(r)
    return sorted(out)


def _float_coeffs_in(p: BiPoly, x0: float, var: str) -> list[float]:
    """Coefficients (low first) of ``p`` as a polynomial in ``var`` with the other variable fixed."""
    deg = p.degree_in(var)
    deg = 0 if deg < 0 else int(deg)
    out = [0.0] * (deg + 1)
    for (i, j), c in p.terms.items():
        if var == "v":
            out[i] += float(c) * x0 ** j
        else:
            out[j] += float(c) * x0 ** i
    return out


def _solve_along(first: BiPoly, second: BiPoly, first_var: str) -> list[CritPoint]:
    """Critical points when ``first`` depends on ``first_var`` only.

    Roots ``c`` of ``first`` are found exactly where rational; ``second`` is
    then solved in the remaining variable on the line ``first_var = c``.
    """
    other = "v" if first_var == "x" else "x"
    f1 = first.as_uni(first_var)
    if f1.is_zero():
        raise NonIsolatedCritSet("one component vanishes identically")
    pts = []
    for c in f1.real_roots():
        if isinstance(c, Fraction):
            sub = (second.substitute(x=BiPoly.const(c)) if first_var == "x"
                   else second.substitute(v=BiPoly.const(c)))
            g = sub.as_uni(other)
            if g.is_zero():
                raise NonIsolatedCritSet(f"the line {first_var} = {rat_str(c)} consists of critical points")
            roots = g.real_roots() if g.degree >= 1 else []
        else:
            cs = _float_coeffs_in(second, c, other)
            if all(abs(a) < 1e-12 for a in cs):
                raise NonIsolatedCritSet(f"the line {first_var} = {c:.6g} consists of critical points")
            roots = _float_roots(cs)
        for r in roots:
            exact = isinstance(c, Fraction) and isinstance(r, Fraction)
            vv, xx = (r, c) if first_var == "x" else (c, r)
            pts.append(CritPoint(vv, xx, "finite", exact))
    return pts


def resultant_v(P: BiPoly, Q: BiPoly) -> UniPoly:
    """``Res_v(P, Q)`` as a polynomial in ``x``, exactly.

    The Sylvester determinant is evaluated at integer abscissae and the
    result interpolated; its degree is bounded by ``deg P * deg Q``.
    """
    dp, dq = int(P.degree_in("v")), int(Q.degree_in("v"))
    bound = max(P.total_degree, 0) * max(Q.total_degree, 0)
    xs = [Fraction(k) for k in range(-(bound // 2) - 1, bound - bound // 2 + 1)][: bound + 1]
    ys = [_sylvester_det(_coeffs_v_at(P, x0, dp), _coeffs_v_at(Q, x0, dq)) for x0 in xs]
    return _interpolate(xs, ys)


def _coeffs_v_at(p: BiPoly, x0: Fraction, deg: int) -> list[Fraction]:
    out = [Fraction(0)] * (deg + 1)
    for (i, j), c in p.terms.items():
        out[i] += c * x0 ** j
    return out


def _sylvester_det(a: list[Fraction], b: list[Fraction]) -> Fraction:
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    if size == 0:
        return Fraction(1)
    rows = []
    for k in range(n):
        row = [Fraction(0)] * size
        for i, c in enumerate(reversed(a)):
            row[k + i] = c
        rows.append(row)
    for k in range(m):
        row = [Fraction(0)] * size
        for i, c in enumerate(reversed(b)):
            row[k + i] = c
        rows.append(row)
    return _det(rows)


def _det(M: list[list[Fraction]]) -> Fraction:
    M = [list(r) for r in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            if M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return det


def _interpolate(xs: list[Fraction], ys: list[Fraction]) -> UniPoly:
    out = UniPoly()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        basis = UniPoly.const(1)
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * UniPoly([-xj, 1])
                denom *= xi - xj
        out = out + basis * (yi / denom)
    return out


def find_finite_crit_points(sys: QuadSystem) -> list[CritPoint]:
    """All real solutions of ``P = Q = 0``, sorted by ``(x, v)``.

    When one component depends on a single variable (every system built by
    this package has ``Q = Q(x)``) the points are found exactly.  Otherwise
    ``x`` is eliminated with a resultant and the remaining coordinates are
    located in floating point.
    """
    P, Q = sys.P, sys.Q
    if P.is_zero() and Q.is_zero():
        raise NonIsolatedCritSet("the vector field vanishes identically")
    if P.is_zero() or Q.is_zero():
        nz = Q if P.is_zero() else P
        if nz.total_degree > 0:
            raise NonIsolatedCritSet("one component vanishes identically")
        return []
    if Q.total_degree == 0 or P.total_degree == 0:
        return []
    if _x_only(Q):
        pts = _solve_along(Q, P, "x")
    elif _x_only(P):
        pts = _solve_along(P, Q, "x")
    elif _v_only(Q):
        pts = _solve_along(Q, P, "v")
    elif _v_only(P):
        pts = _solve_along(P, Q, "v")
    else:
        pts = _solve_by_resultant(P, Q)
    return sorted(set(pts), key=lambda p: (float(p.x), float(p.v)))


def _solve_by_resultant(P: BiPoly, Q: BiPoly) -> list[CritPoint]:
    res = resultant_v(P, Q)
    if res.is_zero():
        raise NonIsolatedCritSet("P and Q share a nonconstant common factor")
    pts = []
    for c in res.real_roots() if res.degree >= 1 else []:
        if isinstance(c, Fraction):
            gp = P.substitute(x=BiPoly.const(c)).as_uni("v")
            gq = Q.substitute(x=BiPoly.const(c)).as_uni("v")
            if gp.is_zero() and gq.is_zero():
                raise NonIsolatedCritSet(f"the line x = {rat_str(c)} consists of critical points")
            g = gq if gp.is_zero() else gp if gq.is_zero() else uni_gcd(gp, gq)
            for r in (g.real_roots() if g.degree >= 1 else []):
                pts.append(CritPoint(r, c, "finite", isinstance(r, Fraction)))
        else:
            cp = _float_coeffs_in(P, c, "v")
            for r in _float_roots(cp, tol=1e-7):
                qv = Q.eval_float(r, c)
                scale = 1.0 + sum(abs(float(k)) for k in Q.terms.values()) * (1 + abs(r) + abs(c)) ** 2
                if abs(qv) < 1e-8 * scale:
                    pts.append(CritPoint(r, c, "finite", False))
    return pts


# ---------------------------------------------------------------------------
# hyperbolic points
# ---------------------------------------------------------------------------

def classify_hyperbolic(eigs) -> Classification:
    """Type from two eigenvalues with nonzero real parts (or a linear center)."""
    l1, l2 = complex(eigs[0]), complex(eigs[1])
    if l1 == 0 or l2 == 0:
        raise NotApplicable("zero eigenvalue: not a hyperbolic point")
    ev = {"eigenvalues": [_eig_json(l1), _eig_json(l2)]}
    if l1.imag == 0 and l2.imag == 0:
        a, b = l1.real, l2.real
        if a * b < 0:
            return Classification(Kind.SADDLE, ev)
        if a < 0:
            return Classification(Kind.NODE_STABLE, ev, "stable")
        return Classification(Kind.NODE_UNSTABLE, ev, "unstable")
    if l1.real == 0:
        return Classification(Kind.CENTER_OR_WEAK_FOCUS, ev)
    if l1.real < 0:
        return Classification(Kind.FOCUS_STABLE, ev, "stable")
    return Classification(Kind.FOCUS_UNSTABLE, ev, "unstable")


def _eig_json(z):
    if isinstance(z, Fraction):
        return rat_str(z)
    z = complex(z)
    if z.imag == 0:
        return float(f"{z.real:.17g}")
    return [float(f"{z.real:.17g}"), float(f"{z.imag:.17g}")]


def _exact_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def eigenvalues_exact(J) -> tuple:
    """Eigenvalues of a rational 2x2 matrix: ``Fraction`` where rational."""
    (a, b), (c, d) = J
    T, D = a + d, a * d - b * c
    disc = T * T - 4 * D
    r = _exact_sqrt(disc)
    if r is not None:
        return ((T + r) / 2, (T - r) / 2)
    if disc > 0:
        s = math.sqrt(disc)
        return ((float(T) + s) / 2, (float(T) - s) / 2)
    s = math.sqrt(-disc)
    return (complex(float(T) / 2, s / 2), complex(float(T) / 2, -s / 2))


def classify_linear_exact(J) -> Classification:
    """Hyperbolic decision from exact trace, determinant and discriminant."""
    (a, b), (c, d) = J
    T, D = a + d, a * d - b * c
    if D == 0:
        raise NotApplicable("zero eigenvalue: not a hyperbolic point")
    disc = T * T - 4 * D
    eigs = eigenvalues_exact(J)
    ev = {"eigenvalues": [_eig_json(e) for e in eigs], "trace": rat_str(T), "det": rat_str(D)}
    if D < 0:
        return Classification(Kind.SADDLE, ev)
    if disc >= 0:
        return (Classification(Kind.NODE_STABLE, ev, "stable") if T < 0
                else Classification(Kind.NODE_UNSTABLE, ev, "unstable"))
    if T == 0:
        return Classification(Kind.CENTER_OR_WEAK_FOCUS, ev)
    return (Classification(Kind.FOCUS_STABLE, ev, "stable") if T < 0
            else Classification(Kind.FOCUS_UNSTABLE, ev, "unstable"))


# ---------------------------------------------------------------------------
# local normal position
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Transform:
    """``(v, x) = origin + M (X, Y)``; ``position`` names the linear normal form."""

    origin: tuple[Fraction, Fraction]
    M: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]
    Minv: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]
    position: str

    def to_json(self) -> dict:
        def mat(A):
            return [[rat_str(e) for e in row] for row in A]
        return {"origin": [rat_str(c) for c in self.origin], "M": mat(self.M),
                "Minv": mat(self.Minv), "position": self.position}


def _inv2(M):
    (a, b), (c, d) = M
    det = a * d - b * c
    return ((d / det, -b / det), (-c / det, a / det))


def _null_vector(N) -> tuple[Fraction, Fraction]:
    """Kernel vector of a rank-one 2x2 matrix, scaled so its last nonzero entry is 1."""
    (a, b), (c, d) = N
    p, q = (a, b) if (a, b) != (0, 0) else (c, d)
    vec = (-q, p)
    return (vec[0] / vec[1], Fraction(1)) if vec[1] != 0 else (Fraction(1), Fraction(0))


def apply_transform(sys: QuadSystem, tr: Transform) -> QuadSystem:
    """Rewrite ``sys`` in the local coordinates ``(X, Y)`` of ``tr``."""
    X, Y = BiPoly.v(), BiPoly.x()
    (m00, m01), (m10, m11) = tr.M
    v_expr = X.scale(m00) + Y.scale(m01) + tr.origin[0]
    x_expr = X.scale(m10) + Y.scale(m11) + tr.origin[1]
    P = sys.P.substitute(v=v_expr, x=x_expr)
    Q = sys.Q.substitute(v=v_expr, x=x_expr)
    (n00, n01), (n10, n11) = tr.Minv
    return QuadSystem(P.scale(n00) + Q.scale(n01), P.scale(n10) + Q.scale(n11),
                      {"local_at": [rat_str(c) for c in tr.origin], "position": tr.position},
                      sys.names)


def _check_critical(sys: QuadSystem, pt: CritPoint) -> None:
    if pt.exact:
        if sys.P.eval_rat(pt.v, pt.x) != 0 or sys.Q.eval_rat(pt.v, pt.x) != 0:
            raise NotACriticalPoint(f"({pt.v}, {pt.x}) is not a critical point")
    else:
        v, x = pt.as_float()
        if max(abs(sys.P.eval_float(v, x)), abs(sys.Q.eval_float(v, x))) > 1e-10 * (1 + abs(v) + abs(x)) ** 2:
            raise NotACriticalPoint(f"({v}, {x}) is not a critical point")


def normalize_at_point(sys: QuadSystem, pt: CritPoint) -> tuple[QuadSystem, Transform]:
    """Translate ``pt`` to the origin and put the linear part in normal position.

    Positions: ``"diag"`` (distinct rational eigenvalues), ``"semi"``
    (``diag(0, lam)``, centre direction in the first slot), ``"nilpotent"``
    (``[[0, 1], [0, 0]]``), ``"linear"`` (translation only; complex or
    irrational eigenvalues) and ``"zero"`` (vanishing linear part).
    """
    if not pt.exact:
        raise NotApplicable("exact normalization needs a rational critical point")
    _check_critical(sys, pt)
    J = jacobian_exact(sys, pt.v, pt.x)
    (a, b), (c, d) = J
    T, D = a + d, a * d - b * c
    one, zero = Fraction(1), Fraction(0)
    ident = ((one, zero), (zero, one))
    origin = (rat(pt.v), rat(pt.x))
    if D == 0 and T != 0:
        e0 = _null_vector(J)
        e1 = _null_vector(((a - T, b), (c, d - T)))
        M = ((e0[0], e1[0]), (e0[1], e1[1]))
        position = "semi"
    elif D == 0 and (a, b, c, d) != (0, 0, 0, 0):
        e2 = (zero, one) if (b, d) != (0, 0) else (one, zero)
        e1 = (a * e2[0] + b * e2[1], c * e2[0] + d * e2[1])
        M = ((e1[0], e2[0]), (e1[1], e2[1]))
        position = "nilpotent"
    elif D == 0:
        M, position = ident, "zero"
    else:
        eigs = eigenvalues_exact(J)
        if all(isinstance(e, Fraction) for e in eigs) and eigs[0] != eigs[1] and (b, c) != (0, 0):
            e0 = _null_vector(((a - eigs[0], b), (c, d - eigs[0])))
            e1 = _null_vector(((a - eigs[1], b), (c, d - eigs[1])))
            M, position = ((e0[0], e1[0]), (e0[1], e1[1])), "diag"
        elif b == 0 and c == 0:
            M, position = ident, "diag"
        else:
            M, position = ident, "linear"
    tr = Transform(origin, M, _inv2(M), position)
    return apply_transform(sys, tr), tr


# ---------------------------------------------------------------------------
# series procedures
# ---------------------------------------------------------------------------

def _split_linear(p: BiPoly) -> tuple[BiPoly, BiPoly]:
    low = p.low_order(2)
    return low, p - low


def classify_semi_hyperbolic(local: QuadSystem, lam=None, order: int | None = None) -> Classification:
    """Semi-hyperbolic origin of ``X' = A``, ``Y' = lam*Y + B``.

    With ``s = a_m * sign(lam)``: ``m`` even gives a saddle-node; ``m`` odd
    gives a topological saddle when ``s < 0`` and a topological node when
    ``s > 0`` (unstable for ``lam > 0``, stable for ``lam < 0``, by time
    reversal).  The order grows from ``order`` up to 24 before giving up.
    """
    lin_p, A = _split_linear(local.P)
    lin_q, B = _split_linear(local.Q)
    lam_found = lin_q.coeff(0, 1)
    if lin_p.terms or lin_q.coeff(1, 0) or lin_q.coeff(0, 0) or lam_found == 0:
        raise PreconditionViolated("linear part is not diag(0, lam)")
    if lam is not None and rat(lam) != lam_found:
        raise PreconditionViolated(f"lam={lam} does not match the linear part {lam_found}")
    lam = lam_found
    N = series_order(order)
    while True:
        f = solve_implicit_series(lam, B, N)
        g = compose_series(A, f, "x")
        lead = g.leading()
        if lead is not None:
            break
        if N >= MAX_ORDER:
            raise SeriesInconclusive(f"g vanishes through order {N}")
        N = min(MAX_ORDER, N + 4)
    m, am = lead
    ev = {"m": m, "a_m": rat_str(am), "lambda": rat_str(lam), "order": N}
    if m % 2 == 0:
        return Classification(Kind.SADDLE_NODE, ev)
    s = am if lam > 0 else -am
    if s < 0:
        return Classification(Kind.TOPOLOGICAL_SADDLE, ev)
    return Classification(Kind.TOPOLOGICAL_NODE, ev, "unstable" if lam > 0 else "stable")


def nilpotent_series(local: QuadSystem, order: int) -> tuple[PowerSeries, PowerSeries, PowerSeries]:
    """``(f, F, G)`` for ``X' = Y + A``, ``Y' = B`` truncated at ``order``."""
    lin_p, A = _split_linear(local.P)
    lin_q, B = _split_linear(local.Q)
    if lin_q.terms or lin_p != BiPoly.x():
        raise PreconditionViolated("linear part is not [[0, 1], [0, 0]]")
    f = solve_implicit_series(1, A, order)
    F = compose_series(B, f, "x")
    G = compose_series(A.diff("v") + B.diff("x"), f, "x")
    return f, F, G


def nilpotent_rule(m: int | None, a, n: int | None, b) -> tuple[Kind, str | None]:
    """Outcome of the nilpotent theorem from the leading data of ``F`` and ``G``.

    ``m is None`` means ``F`` vanishes identically; ``n is None`` means the
    same for ``G``.
    """
    if m is None:
        if n is None:
            raise RuleUndecided("F and G both vanish")
        return Kind.DEGENERATE, None
    if n is None:
        if m % 2 == 0:
            return Kind.CUSP, None
        return (Kind.TOPOLOGICAL_SADDLE, None) if a > 0 else (Kind.CENTER_OR_WEAK_FOCUS, None)
    if m % 2 == 0:
        return (Kind.CUSP, None) if m < 2 * n + 1 else (Kind.SADDLE_NODE, None)
    if a > 0:
        return Kind.TOPOLOGICAL_SADDLE, None
    if m < 2 * n + 1 or (m == 2 * n + 1 and b * b + 4 * a * (n + 1) < 0):
        return Kind.CENTER_OR_WEAK_FOCUS, None
    if n % 2 == 1:
        return Kind.ELLIPTIC_HYPERBOLIC, None
    return Kind.NILPOTENT_NODE, ("stable" if b < 0 else "unstable")


def classify_nilpotent(local: QuadSystem, order: int | None = None) -> Classification:
    """Nilpotent origin of ``X' = Y + A``, ``Y' = B``.

    Raises :class:`RuleUndecided` when ``F`` and ``G`` both vanish through
    the maximal order.
    """
    N = series_order(order)
    while True:
        _, F, G = nilpotent_series(local, N)
        lf, lg = F.leading(), G.leading()
        if lf is not None or N >= MAX_ORDER:
            break
        N = min(MAX_ORDER, N + 4)
    m, a = lf if lf is not None else (None, None)
    n, b = lg if lg is not None else (None, None)
    ev = {"m": m, "a": None if a is None else rat_str(a),
          "n": n, "b": None if b is None else rat_str(b), "order": N}
    kind, stab = nilpotent_rule(m, a, n, b)
    return Classification(kind, ev, stab)


# ---------------------------------------------------------------------------
# routing
# ---------------------------------------------------------------------------

def classify_point(sys: QuadSystem, pt: CritPoint, order: int | None = None) -> CritReport:
    """Classify one critical point, choosing the procedure its linear part calls for."""
    _check_critical(sys, pt)
    if not pt.exact:
        return _classify_float(sys, pt)
    local, tr = normalize_at_point(sys, pt)
    if tr.position in ("diag", "linear"):
        return CritReport(pt, classify_linear_exact(jacobian_exact(sys, pt.v, pt.x)), "hyperbolic")
    if tr.position == "semi":
        try:
            cls = classify_semi_hyperbolic(local, order=order)
        except SeriesInconclusive as exc:
            cls = Classification(Kind.DEGENERATE, {"reason": str(exc)})
        return CritReport(pt, _with_transform(cls, tr), "semi-hyperbolic")
    if tr.position == "nilpotent":
        try:
            cls = classify_nilpotent(local, order=order)
        except RuleUndecided as exc:
            cls = Classification(Kind.DEGENERATE, {"reason": str(exc)})
        return CritReport(pt, _with_transform(cls, tr), "nilpotent")
    return CritReport(pt, Classification(Kind.DEGENERATE, {"reason": "linear part vanishes"}),
                      "linearly-zero")


def _with_transform(cls: Classification, tr: Transform) -> Classification:
    ev = dict(cls.evidence)
    ev["transform"] = tr.to_json()
    return Classification(cls.kind, ev, cls.stability)


def _classify_float(sys: QuadSystem, pt: CritPoint) -> CritReport:
    J = jacobian(sys, pt.as_float())
    T, D = float(np.trace(J)), float(np.linalg.det(J))
    scale = max(1.0, float(np.max(np.abs(J)))) ** 2
    if abs(D) < 1e-9 * scale:
        # an exact centre-manifold computation would need algebraic coordinates
        return CritReport(pt, Classification(Kind.DEGENERATE, {
            "reason": "non-hyperbolic point with irrational coordinates",
            "trace": T, "det": D}), "unresolved")
    disc = T * T - 4 * D
    r = cmath.sqrt(disc)
    eigs = ((T + r) / 2, (T - r) / 2)
    if disc >= 0:
        eigs = (eigs[0].real, eigs[1].real)
    cls = classify_hyperbolic(eigs)
    return CritReport(pt, cls, "hyperbolic")


def classify_finite(sys: QuadSystem, order: int | None = None) -> list[CritReport]:
    return [classify_point(sys, p, order) for p in find_finite_crit_points(sys)]
