"""``opf`` command line.

Exit status: 0 on success, 1 when a verification fails, 2 on usage errors.
Output is JSON; exact rationals are written as ``"p/q"`` strings.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from .errors import (NonpositiveLambda, OPFError, PreconditionViolated, UnsupportedParams,
                     ZeroMu)
from .exactpoly import parse_bipoly, rat, rat_str

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return rat(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _nonzero_rational(text: str) -> Fraction:
    q = _rational(text)
    if q == 0:
        raise argparse.ArgumentTypeError("mu must be nonzero")
    return q


def _point(text: str) -> tuple[float, float]:
    try:
        v, x = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'v,x', got {text!r}") from None
    return v, x


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    print(text)


# ---------------------------------------------------------------------------
# system selection
# ---------------------------------------------------------------------------

def _add_selector(p: argparse.ArgumentParser, mu_required: bool = False) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--family", help="family id, e.g. hermite, chebyshev_t, jacobi")
    g.add_argument("--system-json", metavar="PATH", help="system JSON as printed by 'opf system' ('-' for stdin)")
    g.add_argument("--jacobi-shape", action="store_true",
                   help="v' = (l/mu)(1-x^2) + a v x + b v + mu v^2, x' = 1-x^2")
    g.add_argument("--laguerre-shape", action="store_true",
                   help="v' = (l/mu) x + a v + b v x + mu v^2, x' = x")
    p.add_argument("--n", type=int, default=None, help="polynomial degree")
    p.add_argument("--mu", type=_nonzero_rational, default=None)
    p.add_argument("--alpha", type=_rational, default=None)
    p.add_argument("--beta", type=_rational, default=None)
    p.add_argument("--a", type=_rational, default=Fraction(0))
    p.add_argument("--b", type=_rational, default=Fraction(0))
    p.add_argument("--lambda", dest="lam", type=_rational, default=None)


def _select_system(args):
    from .families import family
    from .vfield import QuadSystem, build_family_system, build_parametric_a, build_parametric_b

    if args.system_json:
        raw = sys.stdin.read() if args.system_json == "-" else Path(args.system_json).read_text()
        try:
            return QuadSystem.from_json(json.loads(raw))
        except (ValueError, KeyError) as exc:
            raise UsageError(f"bad system JSON: {exc}") from None
    if args.jacobi_shape or args.laguerre_shape:
        if args.lam is None or args.mu is None:
            raise UsageError("--lambda and --mu are required for the parametric shapes")
        if args.jacobi_shape:
            return build_parametric_a(args.lam, args.mu, args.a, args.b)
        return build_parametric_b(args.lam, args.mu, args.a, args.b)
    if args.family:
        if args.n is None or args.mu is None:
            raise UsageError("--n and --mu are required with --family")
        if args.n < 0:
            raise UsageError("--n must be non-negative")
        return build_family_system(family(args.family, args.alpha, args.beta), args.n, args.mu)
    raise UsageError("choose a system: --family, --system-json, --jacobi-shape or --laguerre-shape")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_families(args) -> int:
    from .families import family, registry

    rows = [family(args.family).to_json()] if args.family else [s.to_json() for s in registry()]
    _emit(rows, args.out)
    return EXIT_OK


def cmd_system(args) -> int:
    _emit(_select_system(args).to_json(), args.out)
    return EXIT_OK


def cmd_verify_invariant(args) -> int:
    from .families import family
    from .vfield import verify_invariant

    system = _select_system(args)
    if args.f:
        f = parse_bipoly(args.f, system.names)
    elif args.family:
        from .vfield import invariant_curve
        f = invariant_curve(family(args.family, args.alpha, args.beta), args.n, args.mu).f
    else:
        raise UsageError("--f is required unless --family is given")
    if f.is_zero():
        raise UsageError("f must be nonzero")
    chk = verify_invariant(system, f)
    _emit({"f": f.to_str(system.names),
           "cofactor": chk.cofactor.to_str(system.names) if chk.exact else None,
           "exact": chk.exact,
           "remainder": chk.remainder.to_str(system.names)}, args.out)
    return EXIT_OK if chk.exact else EXIT_FAIL


def cmd_darboux(args) -> int:
    from .darboux import DarbouxProblem, check_invariant_along_flow, invariant_lines, solve_cofactor_relation
    from .vfield import verify_invariant

    system = _select_system(args)
    curves = invariant_lines(system)
    for text in args.curve or ():
        f = parse_bipoly(text, system.names)
        chk = verify_invariant(system, f)
        if not chk.exact:
            _emit({"error": f"{text} is not invariant", "remainder": chk.remainder.to_str(system.names)})
            return EXIT_FAIL
        curves.append((f, chk.cofactor))
    if not curves:
        _emit({"error": "no invariant curves found; supply --curve"})
        return EXIT_FAIL
    if args.s == 0:
        raise UsageError("--s must be nonzero")
    cert = solve_cofactor_relation(DarbouxProblem(system, curves), args.s)
    if cert is None:
        _emit({"curves": [f.to_str(system.names) for f, _ in curves], "feasible": False})
        return EXIT_FAIL
    out = cert.to_json()
    code = EXIT_OK
    if not args.no_flow:
        chk = check_invariant_along_flow(cert, system, args.start, T=args.horizon, tol=args.tol)
        out["flow_check"] = {"start": list(args.start), "T": args.horizon, **chk.to_json()}
        code = EXIT_OK if chk.passed else EXIT_FAIL
    _emit(out, args.out)
    return code


def cmd_critical_points(args) -> int:
    from .classify import classify_finite
    from .compactify import infinity_crit_points

    system = _select_system(args)
    reports = [r.to_json() for r in classify_finite(system)]
    if args.include_infinity:
        reports += [p.to_json() for p in infinity_crit_points(system)]
    _emit(reports, args.out)
    return EXIT_OK


def cmd_portrait(args) -> int:
    from .portrait import PortraitSpec, render_portrait

    system = _select_system(args)
    try:
        spec = PortraitSpec(mode=args.mode, tol=args.tol, horizon=args.horizon, grid=args.grid,
                            max_trajectories=args.max_trajectories,
                            seeds=tuple(args.seeds.split(",")),
                            user_seeds=tuple(args.seed or ()),
                            window=tuple(args.window) if args.window else PortraitSpec.window)
    except PreconditionViolated as exc:
        raise UsageError(str(exc)) from None
    portrait = render_portrait(system, spec)
    svg = args.svg or "portrait.svg"
    man = portrait.write(svg_path=svg, csv_path=args.csv, manifest_path=args.out)
    print(json.dumps(man, indent=2))
    return EXIT_OK if portrait.glyph_count == portrait.expected_glyphs() else EXIT_FAIL


def cmd_chebyshev_integral(args) -> int:
    import numpy as np

    from .integrals import (bridge_roundtrip_error, bridge_wv, chebyshev_solutions_residual,
                            chebyshev_system, check_first_integral_flow, first_integral_v,
                            first_integral_w, reduced_equation, reduced_system, w_v_agreement)

    if args.n is None or args.n < 1:
        raise UsageError("--n must be a positive integer")
    mu = args.mu if args.mu is not None else Fraction(1)
    res = chebyshev_solutions_residual(args.n, np.linspace(-0.95, 0.95, 39))
    q = reduced_equation(args.n)
    rng = np.random.default_rng(0)
    pts = [(float(rng.uniform(-3, 3)), float(rng.uniform(-0.95, 0.95))) for _ in range(200)]
    out = {
        "n": args.n, "mu": rat_str(mu),
        "exact_residual_T": res.exact_zero,
        "residual_U": res.max_residual_U,
        "reduced_numerator": [rat_str(c) for c in q.num.coeffs],
        "reduced_denominator": q.den.to_str(),
        "first_integral_w": str(first_integral_w(args.n)),
        "first_integral_v": str(first_integral_v(args.n, mu)),
        "bridge_roundtrip_err": bridge_roundtrip_error(mu, pts),
        "wv_agreement": w_v_agreement(args.n, mu, pts),
    }
    ok = res.exact_zero and out["bridge_roundtrip_err"] < 1e-12 and out["wv_agreement"] < 1e-9
    if args.check_flow:
        start = args.start
        dv = check_first_integral_flow(first_integral_v(args.n, mu), chebyshev_system(args.n, mu),
                                       [start], T=args.horizon, tol=args.tol)
        w0 = bridge_wv(mu).forward(start[0], start[1])
        # the reduced carrier runs 4(1-x^2)^2 times faster in x
        dw = check_first_integral_flow(first_integral_w(args.n), reduced_system(args.n),
                                       [(w0, start[1])], T=args.horizon / (4 * (1 - start[1] ** 2) ** 2),
                                       tol=args.tol)
        out["drift_v"] = dv.max_drift
        out["drift_w"] = dw.max_drift
        ok = ok and dv.passed and dw.passed
    _emit(out, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_selftest(args) -> int:
    from .acceptance import FAULTABLE, run_all

    faults = tuple(args.inject_fault or ())
    bad = [f for f in faults if f not in FAULTABLE]
    if bad:
        raise UsageError(f"faults can be injected into {', '.join(FAULTABLE)} only")
    results = run_all(faults=faults)
    if args.json:
        _emit({"passed": all(r.passed for r in results), "criteria": [r.to_json() for r in results]},
              args.out)
    else:
        for r in results:
            print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opf", description=__doc__.splitlines()[0].strip("`"))
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, selector=True):
        p = sub.add_parser(name, help=help_)
        if selector:
            _add_selector(p)
        p.add_argument("-o", "--out", help="also write the JSON output to this file")
        p.set_defaults(func=fn)
        return p

    p = add("families", cmd_families, "list the family table", selector=False)
    p.add_argument("--family")
    add("system", cmd_system, "print a system as JSON")
    p = add("verify-invariant", cmd_verify_invariant, "check Xf = Kf exactly")
    p.add_argument("--f", help="candidate curve, e.g. 'x+1'")
    p = add("darboux", cmd_darboux, "solve the cofactor relation and check the invariant")
    p.add_argument("--s", type=_rational, default=Fraction(1))
    p.add_argument("--curve", action="append", help="extra invariant curve (repeatable)")
    p.add_argument("--start", type=_point, default=(0.1, 2.0), help="flow-check start 'v,x'")
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--no-flow", action="store_true", help="skip the numerical flow check")
    p = add("critical-points", cmd_critical_points, "classify critical points")
    p.add_argument("--include-infinity", action="store_true")
    p = add("portrait", cmd_portrait, "render a phase portrait")
    p.add_argument("--svg", help="SVG output path (default portrait.svg)")
    p.add_argument("--csv", help="trajectory CSV output path")
    p.add_argument("--mode", choices=("disk", "plane"), default="disk")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--horizon", type=float, default=6.0)
    p.add_argument("--grid", type=int, default=7)
    p.add_argument("--max-trajectories", type=int, default=400)
    p.add_argument("--seeds", default="grid,separatrix,invariant-lines")
    p.add_argument("--seed", type=_point, action="append", help="user seed 'v,x' (repeatable)")
    p.add_argument("--window", type=float, nargs=4, metavar=("VMIN", "VMAX", "XMIN", "XMAX"))
    p = sub.add_parser("chebyshev-integral", help="Chebyshev first integrals and checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", type=_nonzero_rational, default=None)
    p.add_argument("--check-flow", action="store_true")
    p.add_argument("--start", type=_point, default=(0.2, 0.3))
    p.add_argument("--horizon", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_chebyshev_integral)
    p = sub.add_parser("selftest", help="run the acceptance grid")
    p.add_argument("--json", action="store_true")
    p.add_argument("--inject-fault", action="append", metavar="CRITERION",
                   help="corrupt one criterion's data to exercise failure reporting")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_selftest)
    return parser


_NEG_FRACTION = re.compile(r"-\d+/\d+")


def _attach_negative_fractions(argv: list[str]) -> list[str]:
    """Rewrite ``--mu -2/3`` as ``--mu=-2/3``; argparse would read ``-2/3`` as a flag."""
    out: list[str] = []
    for tok in argv:
        if (_NEG_FRACTION.fullmatch(tok) and out and out[-1].startswith("--")
                and "=" not in out[-1]):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negative_fractions(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ZeroMu, NonpositiveLambda, UnsupportedParams, PreconditionViolated) as exc:
        print(f"opf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OPFError, ValueError) as exc:
        print(f"opf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
