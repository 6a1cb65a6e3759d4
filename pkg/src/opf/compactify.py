"""Poincaré compactification: equator directions and the two chart systems.

Charts, for a system of degree ``m`` in the variables ``(v, x)``:

``U1`` (direction of ``x``)
    ``x = 1/z``, ``v = u/z``; coordinates ``(u, z)`` printed as ``(v, z)``.
``U2`` (direction of ``v``)
    ``v = 1/z``, ``x = u/z``; coordinates printed as ``(x, z)``.

Both are multiplied by ``z^(m-1)`` so the chart fields are polynomial.  The
antipodal charts ``V1``, ``V2`` carry the same field times ``(-1)^(m-1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .classify import (Classification, CritPoint, CritReport, Kind, classify_point,
                       _num_json)
from .errors import IdenticallyZero
from .exactpoly import BiPoly, UniPoly
from .vfield import QuadSystem

_SWAP_STABILITY = {
    Kind.NODE_STABLE: Kind.NODE_UNSTABLE,
    Kind.NODE_UNSTABLE: Kind.NODE_STABLE,
    Kind.FOCUS_STABLE: Kind.FOCUS_UNSTABLE,
    Kind.FOCUS_UNSTABLE: Kind.FOCUS_STABLE,
}


@dataclass(frozen=True)
class ChartSystem:
    chart: str
    sys: QuadSystem
    sign: int = 1


def _degree(sys: QuadSystem) -> int:
    return max(sys.degree, 1)


def infinity_equation(sys: QuadSystem) -> BiPoly:
    """``X Q_m(X, Y) - Y P_m(X, Y)`` with ``X`` in the ``v`` slot and ``Y`` in the ``x`` slot."""
    m = _degree(sys)
    Pm, Qm = sys.P.homogeneous_part(m), sys.Q.homogeneous_part(m)
    h = BiPoly.v() * Qm - BiPoly.x() * Pm
    if h.is_zero():
        raise IdenticallyZero("the equator consists of critical points")
    return h


def infinity_directions(sys: QuadSystem) -> list[tuple[float, float]]:
    """Unit directions ``(X, Y)`` with ``Y >= 0`` (one per antipodal pair) where the equation vanishes."""
    h = infinity_equation(sys)
    d = h.total_degree
    # h(u, 1) picks up directions with Y != 0, the factor X^k with Y = 0 the rest
    in_u = UniPoly([h.coeff(i, d - i) for i in range(d + 1)])
    dirs = []
    for r in (in_u.real_roots() if in_u.degree >= 1 else []):
        n = math.hypot(float(r), 1.0)
        dirs.append((float(r) / n, 1.0 / n))
    if h.coeff(d, 0) == 0:
        dirs.append((1.0, 0.0))
    return dirs


def _chart_terms(p: BiPoly, m: int, first_is_v: bool) -> BiPoly:
    """``z^m p`` after the chart substitution (``u`` in slot 0, ``z`` in slot 1)."""
    out = {}
    for (i, j), c in p.terms.items():
        # U1: v^i x^j -> u^i z^(m-i-j); U2: v^i x^j -> u^j z^(m-i-j)
        key = (i, m - i - j) if first_is_v else (j, m - i - j)
        out[key] = out.get(key, 0) + c
    return BiPoly(out)


def chart_u1(sys: QuadSystem) -> ChartSystem:
    """``u' = z^m (P - u Q)``, ``z' = -z^(m+1) Q`` evaluated at ``(u/z, 1/z)``."""
    m = _degree(sys)
    u, z = BiPoly.v(), BiPoly.x()
    Pz = _chart_terms(sys.P, m, True)
    Qz = _chart_terms(sys.Q, m, True)
    return ChartSystem("U1", QuadSystem(Pz - u * Qz, -(z * Qz), {"chart": "U1"}, ("v", "z")))


def chart_u2(sys: QuadSystem) -> ChartSystem:
    """``u' = z^m (Q - u P)``, ``z' = -z^(m+1) P`` evaluated at ``(1/z, u/z)``."""
    m = _degree(sys)
    u, z = BiPoly.v(), BiPoly.x()
    Pz = _chart_terms(sys.P, m, False)
    Qz = _chart_terms(sys.Q, m, False)
    return ChartSystem("U2", QuadSystem(Qz - u * Pz, -(z * Pz), {"chart": "U2"}, ("x", "z")))


@dataclass(frozen=True)
class InfinityPoint:
    """One antipodal pair of equator points, with both chart representatives."""

    direction: tuple[float, float]
    report: CritReport
    antipode: CritReport
    representatives: tuple[str, str] = field(default=("U1", "V1"))

    @property
    def kind(self) -> Kind:
        return self.report.kind

    def to_json(self) -> dict:
        out = self.report.to_json()
        out["direction"] = [_num_json(c) for c in self.direction]
        out["antipode"] = {"chart": self.antipode.point.chart, "kind": self.antipode.kind.value,
                           "direction": [_num_json(-c) for c in self.direction]}
        if self.antipode.classification.stability is not None:
            out["antipode"]["stability"] = self.antipode.classification.stability
        return out


def _antipode(rep: CritReport, chart: str, m: int) -> CritReport:
    cls = rep.classification
    kind, stab = cls.kind, cls.stability
    if (m - 1) % 2 == 1:
        kind = _SWAP_STABILITY.get(kind, kind)
        stab = {"stable": "unstable", "unstable": "stable"}.get(stab, stab)
    pt = CritPoint(rep.point.v, rep.point.x, chart, rep.point.exact)
    return CritReport(pt, Classification(kind, cls.evidence, stab), rep.method)


def infinity_crit_points(sys: QuadSystem, order: int | None = None) -> list[InfinityPoint]:
    """Equator critical points, classified in the ``U1`` chart and at the ``U2`` origin.

    Every direction with a nonzero ``x`` component is a root of the ``U1``
    field on ``z = 0``; the ``v`` direction itself is the ``U2`` origin.
    """
    infinity_equation(sys)  # raises on a degenerate equator
    m = _degree(sys)
    out = []
    c1 = chart_u1(sys)
    on_eq = c1.sys.P.substitute(x=BiPoly.const(0)).as_uni("v")
    roots = on_eq.real_roots() if on_eq.degree >= 1 else []
    for r in roots:
        pt = CritPoint(r, Fraction(0), "U1", isinstance(r, Fraction))
        rep = classify_point(c1.sys, pt, order)
        n = math.hypot(float(r), 1.0)
        out.append(InfinityPoint((float(r) / n, 1.0 / n), rep, _antipode(rep, "V1", m), ("U1", "V1")))
    c2 = chart_u2(sys)
    if c2.sys.P.coeff(0, 0) == 0:
        pt = CritPoint(Fraction(0), Fraction(0), "U2", True)
        rep = classify_point(c2.sys, pt, order)
        out.append(InfinityPoint((1.0, 0.0), rep, _antipode(rep, "V2", m), ("U2", "V2")))
    return out
