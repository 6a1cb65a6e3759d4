"""Acceptance grid A1-A8, shared by ``opf selftest`` and the test suite."""
from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .classify import Kind, classify_finite
from .compactify import infinity_crit_points
from .darboux import (DarbouxProblem, check_invariant_along_flow, invariant_lines,
                      solve_cofactor_relation)
from .exactpoly import UniPoly
from .families import Family, family, lambda_n
from .integrals import (bridge_roundtrip_error, chebyshev_system, chebyshev_solutions_residual,
                        check_first_integral_flow, first_integral_v, reduced_equation,
                        w_v_agreement)
from .portrait import PortraitSpec, darboux_drift, render_portrait
from .vfield import (build_family_system, build_parametric_a, build_parametric_b,
                     invariant_curve, lie_derivative)

PARAM_VALUES = (Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1))
MUS = (Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 3))

# five starts in |x| < 0.9 and five in x > 1.1, all bounded on [0, 1]
DARBOUX_STARTS = ((-3.0, 0.5), (-2.5, 0.0), (-4.0, -0.6), (-3.0, 0.8), (-2.0, -0.2),
                  (0.1, 2.0), (-0.5, 1.5), (0.3, 1.2), (-1.0, 3.0), (0.0, 1.8))
CHEB_STARTS = ((0.2, 0.5), (-0.3, 0.1), (0.1, -0.4))


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"{self.name} {'PASS' if self.passed else 'FAIL'}  {self.detail} ({self.seconds:.2f} s)"

    def to_json(self) -> dict:
        return {"criterion": self.name, "passed": self.passed, "detail": self.detail,
                "seconds": round(self.seconds, 3)}


def family_grid():
    """Every family with each admissible parameter choice from the sample set."""
    for fid in Family:
        if fid is Family.JACOBI:
            for a in PARAM_VALUES:
                for b in PARAM_VALUES:
                    yield family(fid, a, b)
        elif fid is Family.GEGENBAUER:
            for a in PARAM_VALUES:
                if a > Fraction(-1, 2):
                    yield family(fid, a)
        elif fid is Family.LAGUERRE_ASSOC:
            for a in PARAM_VALUES:
                yield family(fid, a)
        else:
            yield family(fid)


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, not a crashed selftest
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(name, ok, detail, time.perf_counter() - t0)


def a1(fault: bool = False) -> CriterionResult:
    def run():
        count = bad = 0
        for spec in family_grid():
            for n in range(13):
                for mu in MUS:
                    curve = invariant_curve(spec, n, mu)
                    K = curve.cofactor + 1 if fault else curve.cofactor
                    sys = build_family_system(spec, n, mu)
                    if not (lie_derivative(sys, curve.f) - K * curve.f).is_zero():
                        bad += 1
                    count += 1
        return bad == 0, f"Xf - Kf == 0 exactly for {count - bad}/{count} instances"
    return _timed("A1", run)


def darboux_fixture():
    return build_parametric_a(2, 1, 0, 0)


def a2(fault: bool = False) -> CriterionResult:
    def run():
        sys = darboux_fixture()
        cert = solve_cofactor_relation(DarbouxProblem(sys, invariant_lines(sys)), s=1)
        if cert is None:
            return False, "cofactor relation infeasible"
        lambdas = dict(zip((f.to_str() for f in cert.curves), cert.lambdas))
        if fault:
            lambdas["x+1"] += 1
        exact = lambdas == {"x+1": Fraction(-1, 2), "x-1": Fraction(1, 2)} and cert.cofactor_sum().is_zero()
        drift = max(check_invariant_along_flow(cert, sys, s, T=1.0, rtol=1e-10).max_drift
                    for s in DARBOUX_STARTS)
        ok = exact and drift < 1e-6
        return ok, (f"lambdas={{x+1: {lambdas['x+1']}, x-1: {lambdas['x-1']}}}, "
                    f"max drift {drift:.2e} over {len(DARBOUX_STARTS)} starts")
    return _timed("A2", run)


def a3() -> CriterionResult:
    def run():
        target = Counter({Kind.SADDLE: 2, Kind.NODE_STABLE: 1, Kind.NODE_UNSTABLE: 1})
        checked = 0
        for a in (-1, 1, 2, Fraction(-1, 2)):
            for lam in (2, 6):
                for mu in (1, -1):
                    reps = classify_finite(build_parametric_a(lam, mu, a))
                    if Counter(r.kind for r in reps) != target:
                        return False, f"a={a}, lambda={lam}, mu={mu}: {[r.kind.value for r in reps]}"
                    checked += 1
        for lam in (2, 6):
            for mu in (1, -1):
                reps = classify_finite(build_parametric_a(lam, mu, 0))
                if len(reps) != 2:
                    return False, f"a=0: expected 2 points, got {len(reps)}"
                for r in reps:
                    ev = r.classification.evidence
                    if r.kind is not Kind.SADDLE_NODE or ev.get("m") != 2 or Fraction(ev["a_m"]) != mu:
                        return False, f"a=0, lambda={lam}, mu={mu}: {r.to_json()}"
                checked += 1
        return True, f"{checked} parameter sets: 2 saddles + stable/unstable node; a=0 saddle-nodes (m=2, a_m=mu)"
    return _timed("A3", run)


def a4() -> CriterionResult:
    def run():
        checked = 0
        for a in (-2, -1, 1, 2):
            for b in (-1, 0, 1):
                for lam in (2, 6):
                    for mu in (1, -1):
                        reps = classify_finite(build_parametric_b(lam, mu, a, b))
                        if Counter(r.kind for r in reps) != Counter({Kind.SADDLE: 1, Kind.NODE_UNSTABLE: 1}):
                            return False, f"a={a}, b={b}: {[r.kind.value for r in reps]}"
                        checked += 1
        for b in (-1, 0, 1):
            for mu in (1, -1):
                reps = classify_finite(build_parametric_b(2, mu, 0, b))
                if len(reps) != 1 or reps[0].kind is not Kind.SADDLE_NODE or reps[0].point.location != (0, 0):
                    return False, f"a=0, b={b}, mu={mu}: {[r.to_json() for r in reps]}"
                checked += 1
        return True, f"{checked} parameter sets: saddle + unstable node; a=0 saddle-node at origin"
    return _timed("A4", run)


def a5() -> CriterionResult:
    def run():
        checked = 0
        for a in (-1, 0, 1, 2):
            for lam in (2, 6):
                for mu in (1, -1):
                    pts = infinity_crit_points(build_parametric_a(lam, mu, a))
                    u1 = {float(p.report.point.v): p for p in pts if p.report.point.chart == "U1"}
                    u2 = [p for p in pts if p.report.point.chart == "U2"]
                    D = (a + 1) ** 2 + 4 * lam
                    v1 = (-(a + 1) + math.sqrt(D)) / (2 * mu)
                    v2 = (-(a + 1) - math.sqrt(D)) / (2 * mu)
                    if len(u1) != 2 or len(u2) != 1:
                        return False, f"a={a}, lambda={lam}, mu={mu}: {len(u1)} U1 points, {len(u2)} U2 points"
                    got1 = min(u1, key=lambda u: abs(u - v1))
                    got2 = min(u1, key=lambda u: abs(u - v2))
                    if abs(got1 - v1) > 1e-10 or abs(got2 - v2) > 1e-10:
                        return False, f"U1 roots {sorted(u1)} vs closed forms {v1}, {v2}"
                    if abs(got1 * got2 + lam / mu ** 2) > 1e-10:
                        return False, "Vieta product mismatch"
                    if u1[got1].kind is not Kind.NODE_UNSTABLE or u1[got2].kind is not Kind.SADDLE:
                        return False, f"a={a}, lambda={lam}, mu={mu}: v1 {u1[got1].kind.value}, v2 {u1[got2].kind.value}"
                    want = Kind.NODE_STABLE if mu > 0 else Kind.NODE_UNSTABLE
                    if u2[0].kind is not want:
                        return False, f"U2 origin {u2[0].kind.value}, expected {want.value}"
                    checked += 1
        for b in (-2, -1, 1, 2, 0):
            for a in (-1, 0, 1):
                for mu in (1, -1):
                    pts = [p for p in infinity_crit_points(build_parametric_b(2, mu, a, b))
                           if p.report.point.chart == "U1"]
                    kinds = [p.kind for p in pts]
                    if b != 0:
                        if kinds != [Kind.SADDLE_NODE, Kind.SADDLE_NODE]:
                            return False, f"b={b}: {[k.value for k in kinds]}"
                    else:
                        if len(pts) != 1 or kinds[0] is not Kind.SADDLE_NODE:
                            return False, f"b=0: {[k.value for k in kinds]}"
                        rep = pts[0].report
                        ev = rep.classification.evidence
                        if rep.method != "nilpotent" or ev.get("m") != 4 or ev.get("n") != 1:
                            return False, f"b=0 evidence {ev}"
                    checked += 1
        return True, f"{checked} parameter sets: v1 unstable node, v2 saddle, U2 node by sign(-mu); nilpotent (m=4, n=1)"
    return _timed("A5", run)


def a6(fault: bool = False) -> CriterionResult:
    def run():
        for n in range(1, 13):
            res = chebyshev_solutions_residual(n, [0.3])
            exact = res.exact_T
            if fault and n == 3:
                exact = exact + UniPoly.x()
            if not exact.is_zero():
                return False, f"Chebyshev residual nonzero at n={n}: {exact}"
            q = reduced_equation(n)
            lam = Fraction(n * n)
            if list(q.num.coeffs) != [-2 - 4 * lam, 0, 4 * lam - 1]:
                return False, f"reduced numerator at n={n}: {q.num}"
        spec = family(Family.CHEBYSHEV_T)
        if any(lambda_n(spec, n) != n * n for n in range(13)):
            return False, "lambda_n != n^2"
        return True, "(1-x^2)T'' - xT' + n^2 T == 0 and reduced numerator (-2-4l, 0, 4l-1) for n <= 12"
    return _timed("A6", run)


def a7() -> CriterionResult:
    def run():
        drift = 0.0
        for n in (1, 2, 3):
            for mu in (1, -1):
                chk = check_first_integral_flow(first_integral_v(n, mu), chebyshev_system(n, mu),
                                                CHEB_STARTS, T=0.5)
                drift = max(drift, chk.max_drift)
        rng = np.random.default_rng(20240917)
        pts = [(float(rng.uniform(-3, 3)), float(rng.uniform(-0.95, 0.95))) for _ in range(200)]
        rt = max(bridge_roundtrip_error(mu, pts) for mu in (1, -1, 2))
        agree = max(w_v_agreement(n, mu, pts) for n in (1, 2, 3) for mu in (1, -1))
        ok = drift < 1e-6 and rt < 1e-12 and agree < 1e-9
        return ok, f"drift {drift:.2e}, bridge roundtrip {rt:.2e}, w/v agreement {agree:.2e}"
    return _timed("A7", run)


DARBOUX_FIXTURE = "darboux(lambda=2, mu=1, a=0, b=0)"


def portrait_fixtures():
    return {
        "parametric-a(a=1, lambda=2, mu=1)": build_parametric_a(2, 1, 1),
        "parametric-b(a=0, b=1, lambda=2, mu=1)": build_parametric_b(2, 1, 0, 1),
        DARBOUX_FIXTURE: darboux_fixture(),
    }


def a8(spec: PortraitSpec | None = None) -> CriterionResult:
    def run():
        pspec = spec or PortraitSpec(grid=5, horizon=5.0, tol=1e-8)
        notes, rendered = [], {}
        for name, sys in portrait_fixtures().items():
            p1 = rendered[name] = render_portrait(sys, pspec)
            p2 = render_portrait(sys, pspec)
            expected = len(p1.finite) + 2 * len(p1.infinity)
            if p1.glyph_count != expected:
                return False, f"{name}: {p1.glyph_count} glyphs vs {expected} classified points"
            if p1.svg != p2.svg:
                return False, f"{name}: SVG differs between runs"
            notes.append(f"{p1.glyph_count}")
        sys = darboux_fixture()
        cert = solve_cofactor_relation(DarbouxProblem(sys, invariant_lines(sys)))
        drift, checked = darboux_drift(rendered[DARBOUX_FIXTURE], cert)
        ok = drift < 1e-5 and checked > 0
        return ok, f"glyphs {'/'.join(notes)} match classifiers, deterministic SVG, drift {drift:.2e} on {checked} trajectories"
    return _timed("A8", run)


CRITERIA = {"A1": a1, "A2": a2, "A3": a3, "A4": a4, "A5": a5, "A6": a6, "A7": a7, "A8": a8}
FAULTABLE = ("A1", "A2", "A6")


def run_all(faults=(), only=None) -> list[CriterionResult]:
    out = []
    for name, fn in CRITERIA.items():
        if only and name not in only:
            continue
        out.append(fn(fault=True) if name in faults and name in FAULTABLE else fn())
    return out
