"""Phase portraits in a plane window or on the Poincaré disk.

Rendering is a deterministic fold over trajectories ordered by seed index:
no randomness, fixed float formatting, so identical inputs give
byte-identical SVG.  Topological decisions never come from the picture; the
glyphs are placed from :mod:`opf.classify` and :mod:`opf.compactify` reports.
"""
from __future__ import annotations

import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .classify import CritReport, Kind, classify_finite
from .compactify import InfinityPoint, infinity_crit_points
from .darboux import DarbouxCertificate, drift_along, invariant_lines, invariant_value
from .errors import IdenticallyZero, PoleAtPoint, PreconditionViolated
from .integrator import Trajectory, integrate
from .vfield import QuadSystem, jacobian

SIZE = 640
MARGIN = 24
SEPARATRIX_OFFSET = 1e-4

_STYLE = {
    Kind.SADDLE: ("cross", "#c0392b"),
    Kind.TOPOLOGICAL_SADDLE: ("cross", "#e67e22"),
    Kind.NODE_STABLE: ("disc", "#2471a3"),
    Kind.NODE_UNSTABLE: ("ring", "#2471a3"),
    Kind.TOPOLOGICAL_NODE: ("ring", "#1abc9c"),
    Kind.NILPOTENT_NODE: ("ring", "#16a085"),
    Kind.FOCUS_STABLE: ("disc", "#8e44ad"),
    Kind.FOCUS_UNSTABLE: ("ring", "#8e44ad"),
    Kind.CENTER_OR_WEAK_FOCUS: ("diamond", "#8e44ad"),
    Kind.SADDLE_NODE: ("half", "#27ae60"),
    Kind.CUSP: ("triangle", "#7f8c8d"),
    Kind.ELLIPTIC_HYPERBOLIC: ("diamond", "#d35400"),
    Kind.DEGENERATE: ("square", "#34495e"),
}


def disk_map(p) -> np.ndarray:
    """Central projection ``p / (1 + sqrt(1 + |p|^2))`` onto the open unit disk.

    Works on a single point or an ``(k, 2)`` array of points.
    """
    p = np.asarray(p, dtype=float)
    r2 = np.sum(p * p, axis=-1, keepdims=True)
    return p / (1.0 + np.sqrt(1.0 + r2))


@dataclass
class PortraitSpec:
    """What to draw.

    ``window`` is ``(vmin, vmax, xmin, xmax)`` and only used in plane mode.
    ``seeds`` is a subset of ``("grid", "separatrix", "invariant-lines",
    "user")``; ``user_seeds`` holds explicit ``(v, x)`` starts.
    """

    mode: str = "disk"
    window: tuple[float, float, float, float] = (-4.0, 4.0, -3.0, 3.0)
    seeds: tuple[str, ...] = ("grid", "separatrix", "invariant-lines")
    tol: float = 1e-8
    horizon: float = 6.0
    max_trajectories: int = 400
    grid: int = 7
    user_seeds: tuple[tuple[float, float], ...] = ()
    include_infinity: bool = True

    def __post_init__(self):
        if not 1e-12 <= self.tol <= 1e-3:
            raise PreconditionViolated("tolerance must lie in [1e-12, 1e-3]")
        if not 0 <= self.max_trajectories <= 10_000:
            raise PreconditionViolated("max_trajectories must lie in [0, 10000]")
        if self.mode not in ("disk", "plane"):
            raise PreconditionViolated("mode must be 'disk' or 'plane'")
        unknown = set(self.seeds) - {"grid", "separatrix", "invariant-lines", "user"}
        if unknown:
            raise PreconditionViolated(f"unknown seed strategies {sorted(unknown)}")
        if self.horizon <= 0:
            raise PreconditionViolated("horizon must be positive")

    def to_json(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        d["seeds"] = list(self.seeds)
        d["user_seeds"] = [list(s) for s in self.user_seeds]
        return d


@dataclass
class Seed:
    index: int
    start: tuple[float, float]
    origin: str


@dataclass
class RenderedTrajectory:
    id: int
    seed: Seed
    direction: int
    trajectory: Trajectory


@dataclass
class Portrait:
    svg: str
    trajectories: list[RenderedTrajectory]
    finite: list[CritReport]
    infinity: list[InfinityPoint]
    spec: PortraitSpec
    lines: list[float] = field(default_factory=list)

    @property
    def glyph_count(self) -> int:
        return self.svg.count('class="glyph"')

    def expected_glyphs(self) -> int:
        n = sum(1 for r in self.finite if self._visible(r.point.as_float()))
        if self.spec.mode == "disk":
            n += 2 * len(self.infinity)
        return n

    def _visible(self, p) -> bool:
        if self.spec.mode == "disk":
            return True
        vmin, vmax, xmin, xmax = self.spec.window
        return vmin <= p[0] <= vmax and xmin <= p[1] <= xmax

    def csv(self) -> str:
        buf = io.StringIO()
        buf.write("trajectory_id,t,v,x\n")
        for rt in self.trajectories:
            for t, v, x in rt.trajectory.samples:
                buf.write(f"{rt.id},{t:.17g},{v:.17g},{x:.17g}\n")
        return buf.getvalue()

    def manifest(self, files: dict | None = None) -> dict:
        return {
            "spec": self.spec.to_json(),
            "critical_points": [r.to_json() for r in self.finite] + [p.to_json() for p in self.infinity],
            "glyphs": self.glyph_count,
            "trajectories": [{"id": rt.id, "seed": rt.seed.index, "origin": rt.seed.origin,
                              "start": list(rt.seed.start), "direction": rt.direction,
                              "reason": rt.trajectory.reason,
                              "samples": int(rt.trajectory.samples.shape[0])}
                             for rt in self.trajectories],
            "files": files or {},
        }

    def write(self, svg_path=None, csv_path=None, manifest_path=None) -> dict:
        files = {}
        if svg_path:
            Path(svg_path).write_text(self.svg)
            files["svg"] = str(svg_path)
        if csv_path:
            Path(csv_path).write_text(self.csv())
            files["csv"] = str(csv_path)
        man = self.manifest(files)
        if manifest_path:
            files["manifest"] = str(manifest_path)
            man["files"] = files
            Path(manifest_path).write_text(json.dumps(man, indent=2, sort_keys=True) + "\n")
        return man


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------

def _line_values(sys: QuadSystem) -> list[float]:
    return [float(-f.coeff(0, 0)) for f, _ in invariant_lines(sys)]


def _separatrix_seeds(sys: QuadSystem, reports: list[CritReport]) -> list[tuple[tuple[float, float], str]]:
    out = []
    for rep in reports:
        if rep.kind not in (Kind.SADDLE, Kind.TOPOLOGICAL_SADDLE, Kind.SADDLE_NODE):
            continue
        p = np.array(rep.point.as_float())
        w, vecs = np.linalg.eig(jacobian(sys, p))
        if np.any(np.abs(w.imag) > 0):
            continue
        for k in np.argsort(w.real, kind="stable"):
            e = vecs[:, k].real
            e = e / np.linalg.norm(e)
            for sgn in (1.0, -1.0):
                q = p + sgn * SEPARATRIX_OFFSET * e
                out.append(((float(q[0]), float(q[1])), "separatrix"))
    return out


def _seeds(sys: QuadSystem, spec: PortraitSpec, finite: list[CritReport], lines: list[float]) -> list[Seed]:
    raw: list[tuple[tuple[float, float], str]] = []
    if "separatrix" in spec.seeds:
        raw += _separatrix_seeds(sys, finite)
    if "invariant-lines" in spec.seeds:
        for c in lines:
            for v in (-2.0, -0.5, 0.5, 2.0):
                raw.append(((v, c), "invariant-line"))
    if "grid" in spec.seeds and spec.grid > 0:
        vmin, vmax, xmin, xmax = spec.window
        for v in np.linspace(vmin, vmax, spec.grid):
            for x in np.linspace(xmin, xmax, spec.grid):
                if all(abs(x - c) > 1e-9 for c in lines):
                    raw.append(((float(v), float(x)), "grid"))
    if "user" in spec.seeds:
        raw += [((float(v), float(x)), "user") for v, x in spec.user_seeds]
    return [Seed(i, s, o) for i, (s, o) in enumerate(raw[: spec.max_trajectories])]


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _fmt(a: float) -> str:
    s = f"{a:.2f}"
    return "0.00" if s == "-0.00" else s


class _Canvas:
    def __init__(self, spec: PortraitSpec):
        self.spec = spec
        self.half = SIZE / 2
        self.radius = self.half - MARGIN

    def to_px(self, pts: np.ndarray) -> np.ndarray:
        """``(k, 2)`` array of ``(v, x)`` to pixel ``(col, row)``; ``x`` runs horizontally."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.spec.mode == "disk":
            d = disk_map(pts)
            col = self.half + self.radius * d[:, 1]
            row = self.half - self.radius * d[:, 0]
        else:
            vmin, vmax, xmin, xmax = self.spec.window
            col = MARGIN + (pts[:, 1] - xmin) / (xmax - xmin) * (SIZE - 2 * MARGIN)
            row = SIZE - MARGIN - (pts[:, 0] - vmin) / (vmax - vmin) * (SIZE - 2 * MARGIN)
        return np.column_stack([col, row])

    def boundary_px(self, direction) -> tuple[float, float]:
        X, Y = direction
        return self.half + self.radius * Y, self.half - self.radius * X


def _glyph(kind: Kind, chart: str, col: float, row: float, extra: str = "") -> str:
    shape, color = _STYLE[kind]
    c, r = _fmt(col), _fmt(row)
    s = 5.0
    if shape == "cross":
        body = (f'<path d="M{_fmt(col - s)},{_fmt(row - s)}L{_fmt(col + s)},{_fmt(row + s)}'
                f'M{_fmt(col - s)},{_fmt(row + s)}L{_fmt(col + s)},{_fmt(row - s)}" '
                f'stroke="{color}" stroke-width="2"/>')
    elif shape == "disc":
        body = f'<circle cx="{c}" cy="{r}" r="{_fmt(s)}" fill="{color}"/>'
    elif shape == "ring":
        body = f'<circle cx="{c}" cy="{r}" r="{_fmt(s)}" fill="white" stroke="{color}" stroke-width="2"/>'
    elif shape == "half":
        body = (f'<circle cx="{c}" cy="{r}" r="{_fmt(s)}" fill="white" stroke="{color}" stroke-width="2"/>'
                f'<path d="M{_fmt(col)},{_fmt(row - s)}A{_fmt(s)},{_fmt(s)} 0 0 1 {_fmt(col)},{_fmt(row + s)}Z" '
                f'fill="{color}"/>')
    elif shape == "triangle":
        body = (f'<path d="M{_fmt(col)},{_fmt(row - s)}L{_fmt(col + s)},{_fmt(row + s)}'
                f'L{_fmt(col - s)},{_fmt(row + s)}Z" fill="{color}"/>')
    elif shape == "diamond":
        body = (f'<path d="M{_fmt(col)},{_fmt(row - s)}L{_fmt(col + s)},{_fmt(row)}'
                f'L{_fmt(col)},{_fmt(row + s)}L{_fmt(col - s)},{_fmt(row)}Z" fill="{color}"/>')
    else:
        body = f'<rect x="{_fmt(col - s)}" y="{_fmt(row - s)}" width="{_fmt(2 * s)}" height="{_fmt(2 * s)}" fill="{color}"/>'
    return f'<g class="glyph" data-kind="{kind.value}" data-chart="{chart}"{extra}>{body}</g>'


def _polyline(px: np.ndarray, cls: str, color: str, width: str = "0.8") -> str:
    pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in px)
    return f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"/>'


def _thin(px: np.ndarray, min_dist: float = 0.5) -> np.ndarray:
    """Drop consecutive pixel points closer than ``min_dist`` (keeps the endpoints)."""
    if len(px) <= 2:
        return px
    keep = [0]
    for i in range(1, len(px) - 1):
        if np.hypot(*(px[i] - px[keep[-1]])) >= min_dist:
            keep.append(i)
    keep.append(len(px) - 1)
    return px[keep]


def integrate_seeds(sys: QuadSystem, seeds: list[Seed], spec: PortraitSpec,
                    lines: list[float]) -> list[RenderedTrajectory]:
    guards = [(1, c) for c in lines]
    bound = 1e6 if spec.mode == "disk" else 4.0 * max(abs(c) for c in spec.window) + 1.0
    out = []
    for seed in seeds:
        for direction in (1, -1):
            traj = integrate(sys, seed.start, direction * spec.horizon, tol=spec.tol,
                             max_step=spec.horizon / 200, bound=bound, guard_lines=guards,
                             stop_speed=1e-9, strict=False)
            out.append(RenderedTrajectory(len(out), seed, direction, traj))
    return out


def render_portrait(sys: QuadSystem, spec: PortraitSpec | None = None,
                    finite: list[CritReport] | None = None,
                    infinity: list[InfinityPoint] | None = None) -> Portrait:
    """Integrate the seeded trajectories and draw them with the classified points."""
    spec = spec or PortraitSpec()
    if finite is None:
        finite = classify_finite(sys)
    if infinity is None:
        infinity = []
        if spec.include_infinity and spec.mode == "disk":
            try:
                infinity = infinity_crit_points(sys)
            except IdenticallyZero:
                infinity = []
    lines = _line_values(sys)
    seeds = _seeds(sys, spec, finite, lines)
    trajs = integrate_seeds(sys, seeds, spec, lines)
    canvas = _Canvas(spec)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
             f'viewBox="0 0 {SIZE} {SIZE}">',
             f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>']
    if spec.mode == "disk":
        parts.append(f'<clipPath id="view"><circle cx="{_fmt(canvas.half)}" cy="{_fmt(canvas.half)}" '
                     f'r="{_fmt(canvas.radius)}"/></clipPath>')
    else:
        parts.append(f'<clipPath id="view"><rect x="{MARGIN}" y="{MARGIN}" width="{SIZE - 2 * MARGIN}" '
                     f'height="{SIZE - 2 * MARGIN}"/></clipPath>')
    parts.append('<g clip-path="url(#view)">')
    for c in lines:
        s = np.sinh(np.linspace(-14.0, 14.0, 401)) if spec.mode == "disk" else \
            np.linspace(spec.window[0], spec.window[1], 2)
        px = canvas.to_px(np.column_stack([s, np.full_like(s, c)]))
        parts.append(_polyline(px, "invariant-line", "#f1c40f", "2.5"))
    for rt in trajs:
        px = _thin(canvas.to_px(rt.trajectory.points))
        color = "#555555" if rt.seed.origin != "separatrix" else "#c0392b"
        parts.append(_polyline(px, "trajectory", color))
    parts.append("</g>")
    if spec.mode == "disk":
        parts.append(f'<circle class="boundary" cx="{_fmt(canvas.half)}" cy="{_fmt(canvas.half)}" '
                     f'r="{_fmt(canvas.radius)}" fill="none" stroke="black" stroke-width="1.5"/>')
    for rep in finite:
        p = rep.point.as_float()
        if spec.mode == "plane":
            vmin, vmax, xmin, xmax = spec.window
            if not (vmin <= p[0] <= vmax and xmin <= p[1] <= xmax):
                continue
        col, row = canvas.to_px(np.array([p]))[0]
        parts.append(_glyph(rep.kind, "finite", col, row))
    if spec.mode == "disk":
        for ip in infinity:
            d = ip.direction
            col, row = canvas.boundary_px(d)
            parts.append(_glyph(ip.report.kind, ip.report.point.chart, col, row))
            col, row = canvas.boundary_px((-d[0], -d[1]))
            parts.append(_glyph(ip.antipode.kind, ip.antipode.point.chart, col, row))
    parts.append("</svg>")
    return Portrait("\n".join(parts) + "\n", trajs, finite, infinity, spec, lines)


def darboux_drift(portrait: Portrait, cert: DarbouxCertificate) -> tuple[float, int]:
    """Worst drift of ``|I|`` over the rendered trajectories, and how many were checked.

    Trajectories that touch a pole of ``I`` (a curve with a negative
    exponent) are skipped.
    """
    worst, checked = 0.0, 0
    for rt in portrait.trajectories:
        try:
            vals = [abs(invariant_value(cert, v, x, t)) for t, v, x in rt.trajectory.samples]
        except PoleAtPoint:
            continue
        arr = np.array(vals)
        if not np.all(np.isfinite(arr)) or len(arr) < 2:
            continue
        drift, _ = drift_along(arr)
        worst = max(worst, drift)
        checked += 1
    return worst, checked
