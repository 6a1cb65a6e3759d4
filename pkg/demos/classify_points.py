"""
Finite and infinite critical points
===================================

Two parametric shapes cover the families: the Jacobi-type shape with
x' = 1 - x^2 and the Laguerre-type shape with x' = x.  Hyperbolic points are
decided from exact trace and determinant; degenerate ones through formal
centre-manifold series.
"""
from opf.classify import classify_finite
from opf.compactify import chart_u1, chart_u2, infinity_crit_points
from opf.vfield import build_parametric_a, build_parametric_b


def show(title, sys):
    print(f"\n{title}\n  {sys}")
    for r in classify_finite(sys):
        ev = {k: v for k, v in r.classification.evidence.items() if k in ("m", "a_m", "n", "a", "b")}
        print(f"  finite {r.point.to_json()}: {r.kind.value:18s} {r.method:16s} {ev or ''}")
    for p in infinity_crit_points(sys):
        print(f"  {p.report.point.chart} {p.report.point.to_json()}: {p.kind.value:18s} "
              f"antipode {p.antipode.kind.value}")


###############################################################################
# Four finite points: two saddles and two nodes.
show("Jacobi shape, a=1, lambda=2, mu=1", build_parametric_a(2, 1, 1))

###############################################################################
# With a = 0 the points at x = +-1 collide in pairs and become saddle-nodes.
show("Jacobi shape, a=0", build_parametric_a(2, 1, 0))

###############################################################################
# The Laguerre shape with a = 0 and b = 0 has a nilpotent point at infinity.
sys = build_parametric_b(2, 1, 0, 0)
show("Laguerre shape, a=0, b=0", sys)
print("  chart U1:", chart_u1(sys).sys)
print("  chart U2:", chart_u2(sys).sys)
