"""Acceptance gate A1-A8.

Each test re-derives its criterion's quantities through the public API at the
stated tolerance, cross-checks the ``opf selftest`` verdict, and prints one
PASS/FAIL line (visible with ``pytest -s``).
"""
import math
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from opf import acceptance
from opf.classify import Kind, classify_finite
from opf.compactify import infinity_crit_points
from opf.darboux import (DarbouxProblem, check_invariant_along_flow, invariant_lines,
                         solve_cofactor_relation)
from opf.exactpoly import BiPoly, rat_str
from opf.families import Family, family, lambda_n
from opf.integrals import (bridge_roundtrip_error, chebyshev_solutions_residual, chebyshev_system,
                           check_first_integral_flow, first_integral_v, reduced_equation,
                           w_v_agreement)
from opf.portrait import PortraitSpec, darboux_drift, render_portrait
from opf.vfield import (build_family_system, build_parametric_a, build_parametric_b,
                        invariant_curve, lie_derivative)


def report(name, ok, detail):
    print(f"{name} {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_a1_invariant_curve_identity_is_exact():
    t0 = time.perf_counter()
    count = bad = 0
    for spec in acceptance.family_grid():
        for n in range(13):
            for mu in acceptance.MUS:
                f = invariant_curve(spec, n, mu).f
                cof = BiPoly.from_uni(spec.rho.diff() - spec.tau) + BiPoly.v().scale(mu)
                sys = build_family_system(spec, n, mu)
                bad += not (lie_derivative(sys, f) - cof * f).is_zero()
                count += 1
    secs = time.perf_counter() - t0
    assert count >= 1000
    report("A1", bad == 0 and secs < 10 and acceptance.a1().passed,
           f"{count - bad}/{count} exact, {secs:.1f} s")


def test_a2_darboux_exponents_and_drift():
    t0 = time.perf_counter()
    sys = build_parametric_a(2, 1, 0, 0)
    cert = solve_cofactor_relation(DarbouxProblem(sys, invariant_lines(sys)), 1)
    lambdas = {f.to_str(): lam for f, lam in zip(cert.curves, cert.lambdas)}
    drift = max(check_invariant_along_flow(cert, sys, s, T=1.0, tol=1e-6, rtol=1e-10).max_drift
                for s in acceptance.DARBOUX_STARTS)
    secs = time.perf_counter() - t0
    assert len(acceptance.DARBOUX_STARTS) == 10
    ok = (lambdas == {"x+1": Fraction(-1, 2), "x-1": Fraction(1, 2)} and drift < 1e-6 and secs < 5
          and acceptance.a2().passed)
    shown = ", ".join(f"{k}: {rat_str(v)}" for k, v in lambdas.items())
    report("A2", ok, f"lambdas {{{shown}}}, drift {drift:.2e}, {secs:.2f} s")


def test_a3_jacobi_shape_finite_points():
    t0 = time.perf_counter()
    target = Counter({Kind.SADDLE: 2, Kind.NODE_STABLE: 1, Kind.NODE_UNSTABLE: 1})
    ok = True
    for a in (-1, 1, 2):
        for lam in (2, 6):
            for mu in (1, -1):
                ok &= Counter(r.kind for r in classify_finite(build_parametric_a(lam, mu, a))) == target
    for lam in (2, 6):
        for mu in (1, -1):
            reps = classify_finite(build_parametric_a(lam, mu, 0))
            ok &= len(reps) == 2
            for r in reps:
                ev = r.classification.evidence
                ok &= r.kind is Kind.SADDLE_NODE and ev["m"] == 2 and Fraction(ev["a_m"]) == mu
    secs = time.perf_counter() - t0
    report("A3", ok and secs < 2 and acceptance.a3().passed, f"kinds and series evidence, {secs:.2f} s")


def test_a4_laguerre_shape_finite_points():
    ok = True
    for a in (-2, -1, 1, 2):
        for b in (-1, 0, 1):
            for mu in (1, -1):
                kinds = Counter(r.kind for r in classify_finite(build_parametric_b(2, mu, a, b)))
                ok &= kinds == Counter({Kind.SADDLE: 1, Kind.NODE_UNSTABLE: 1})
    for mu in (1, -1):
        (rep,) = classify_finite(build_parametric_b(2, mu, 0, 1))
        ok &= rep.kind is Kind.SADDLE_NODE and rep.point.location == (0, 0)
    report("A4", ok and acceptance.a4().passed, "saddle + unstable node; a=0 saddle-node at origin")


def test_a5_points_at_infinity():
    worst = 0.0
    ok = True
    for a in (-1, 0, 1, 2):
        for lam in (2, 6):
            for mu in (1, -1):
                pts = infinity_crit_points(build_parametric_a(lam, mu, a))
                u1 = [p for p in pts if p.report.point.chart == "U1"]
                (u2,) = [p for p in pts if p.report.point.chart == "U2"]
                root = math.sqrt((a + 1) ** 2 + 4 * lam)
                v1, v2 = (-(a + 1) + root) / (2 * mu), (-(a + 1) - root) / (2 * mu)
                p1 = min(u1, key=lambda p: abs(float(p.report.point.v) - v1))
                p2 = min(u1, key=lambda p: abs(float(p.report.point.v) - v2))
                worst = max(worst, abs(float(p1.report.point.v) - v1), abs(float(p2.report.point.v) - v2))
                ok &= p1.kind is Kind.NODE_UNSTABLE and p2.kind is Kind.SADDLE
                ok &= u2.kind is (Kind.NODE_STABLE if mu > 0 else Kind.NODE_UNSTABLE)
    for b in (-1, 1, 2):
        for mu in (1, -1):
            u1 = [p for p in infinity_crit_points(build_parametric_b(2, mu, 1, b)) if p.report.point.chart == "U1"]
            ok &= [p.kind for p in u1] == [Kind.SADDLE_NODE] * 2
    (nil,) = [p for p in infinity_crit_points(build_parametric_b(2, 1, 0, 0)) if p.report.point.chart == "U1"]
    ev = nil.report.classification.evidence
    ok &= nil.kind is Kind.SADDLE_NODE and (ev["m"], ev["n"]) == (4, 1)
    report("A5", ok and worst < 1e-10 and acceptance.a5().passed,
           f"closed-form error {worst:.1e}, nilpotent evidence m={ev['m']} n={ev['n']}")


def test_a6_chebyshev_equation_is_exact():
    ok = all(chebyshev_solutions_residual(n, [0.3]).exact_zero for n in range(1, 13))
    for n in range(1, 13):
        lam = lambda_n(family(Family.CHEBYSHEV_T), n)
        ok &= lam == n * n
        ok &= list(reduced_equation(n).num.coeffs) == [-2 - 4 * lam, 0, 4 * lam - 1]
    report("A6", ok and acceptance.a6().passed, "T_n residual and reduced numerator exact for n <= 12")


def test_a7_chebyshev_first_integrals():
    t0 = time.perf_counter()
    drift = max(check_first_integral_flow(first_integral_v(n, mu), chebyshev_system(n, mu),
                                          acceptance.CHEB_STARTS, T=0.5).max_drift
                for n in (1, 2, 3) for mu in (1, -1))
    rng = np.random.default_rng(1)
    pts = [(float(rng.uniform(-3, 3)), float(rng.uniform(-0.95, 0.95))) for _ in range(200)]
    rt = max(bridge_roundtrip_error(mu, pts) for mu in (1, -1))
    agree = max(w_v_agreement(n, mu, pts) for n in (1, 2, 3) for mu in (1, -1))
    secs = time.perf_counter() - t0
    ok = drift < 1e-6 and rt < 1e-12 and agree < 1e-9 and secs < 10 and acceptance.a7().passed
    report("A7", ok, f"drift {drift:.1e}, roundtrip {rt:.1e}, agreement {agree:.1e}, {secs:.2f} s")


def test_a8_portrait_integrity():
    spec = PortraitSpec(grid=5, horizon=5.0, tol=1e-8)
    counts, ok = [], True
    rendered = {}
    for name, sys in acceptance.portrait_fixtures().items():
        p1, p2 = render_portrait(sys, spec), render_portrait(sys, spec)
        rendered[name] = p1
        want = len(classify_finite(sys)) + 2 * len(infinity_crit_points(sys))
        ok &= p1.glyph_count == want and p1.svg == p2.svg
        counts.append(f"{p1.glyph_count}/{want}")
    sys = acceptance.darboux_fixture()
    cert = solve_cofactor_relation(DarbouxProblem(sys, invariant_lines(sys)))
    drift, checked = darboux_drift(rendered[acceptance.DARBOUX_FIXTURE], cert)
    report("A8", ok and checked > 0 and drift < 1e-5,
           f"glyphs {' '.join(counts)}, byte-identical SVG, drift {drift:.1e} on {checked} trajectories")


@pytest.mark.parametrize("name", acceptance.FAULTABLE)
def test_injected_fault_turns_criterion_red(name):
    (res,) = acceptance.run_all(faults=(name,), only=(name,))
    print(f"[injected fault, expected red] {res.line()}")
    assert not res.passed


def test_selftest_lines_format():
    res = acceptance.run_all(only=("A6",))
    assert res[0].line().startswith("A6 PASS  ")
    assert res[0].to_json()["criterion"] == "A6"
