"""Adaptive Dormand-Prince 5(4) integration of planar vector fields."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StepFailure

# Butcher tableau of the Dormand-Prince pair
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

HORIZON = "horizonReached"
LEFT_WINDOW = "leftWindow"
NEAR_SINGULARITY = "nearSingularity"
STEP_FAILURE = "stepFailure"


@dataclass
class Trajectory:
    """Accepted integrator steps as rows ``(t, v, x)``."""

    samples: np.ndarray
    reason: str

    @property
    def t(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def points(self) -> np.ndarray:
        return self.samples[:, 1:]

    @property
    def end(self) -> np.ndarray:
        return self.samples[-1, 1:]


def _rhs_of(system):
    if callable(system):
        return system
    return system.rhs()


def integrate(system, start, T: float, tol: float = 1e-8, *, atol: float | None = None,
              max_step: float = math.inf, bound: float | None = None,
              guard_lines=(), guard_fraction: float = 0.25,
              stop_speed: float | None = None, min_step: float = 1e-13,
              max_steps: int = 200_000, strict: bool = True) -> Trajectory:
    """Integrate from ``start`` over ``[0, T]`` (``T < 0`` runs backwards in time).

    Parameters
    ----------
    system : QuadSystem or callable
        Vector field; a callable must map a length-2 array to a length-2 array.
    tol, atol : float
        Relative and absolute local error tolerances (``atol`` defaults to ``tol``).
    max_step : float
        Upper bound on ``|h|``; use ``T/100`` to force at least 100 samples.
    bound : float, optional
        Stop with reason ``leftWindow`` once ``|(v, x)|`` exceeds this radius.
    guard_lines : sequence of (component, value)
        Invariant lines such as ``(1, 1.0)`` for ``x = 1``; each step's motion
        toward a line is capped at ``guard_fraction`` of the current distance.
    stop_speed : float, optional
        Stop with reason ``nearSingularity`` once ``|f| < stop_speed``.
    strict : bool
        Raise :class:`StepFailure` instead of returning a truncated trajectory.
    """
    f = _rhs_of(system)
    atol = tol if atol is None else atol
    direction = 1.0 if T >= 0 else -1.0
    t_end = float(T)
    y = np.asarray(start, dtype=float).copy()
    t = 0.0
    out = [(t, y[0], y[1])]
    fy = np.asarray(f(y), dtype=float)
    if T == 0:
        return Trajectory(np.array(out), HORIZON)

    h = _initial_step(f, y, fy, tol, atol, abs(t_end))
    h = min(h, max_step, abs(t_end))
    reason = HORIZON
    steps = 0
    while direction * (t_end - t) > 0:
        if steps >= max_steps:
            reason = STEP_FAILURE
            break
        if stop_speed is not None and np.linalg.norm(fy) < stop_speed:
            reason = NEAR_SINGULARITY
            break
        h = min(h, max_step, abs(t_end - t))
        for comp, val in guard_lines:
            speed = abs(fy[comp])
            if speed > 0:
                h = min(h, max(guard_fraction * abs(y[comp] - val) / speed, min_step))
        if h < min_step * max(1.0, abs(t)):
            reason = STEP_FAILURE
            break
        hs = direction * h
        k = np.empty((7, y.size))
        k[0] = fy
        for i in range(1, 7):
            yi = y + hs * np.dot(_A[i], k[:i])
            k[i] = f(yi)
        y_new = y + hs * np.dot(_B5[:6], k[:6])
        k[6] = f(y_new)
        err_vec = hs * np.dot(_E, k)
        scale = atol + tol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
        if not np.all(np.isfinite(y_new)) or not math.isfinite(err):
            h *= 0.2
            continue
        if err <= 1.0:
            t = t + hs if abs(t_end - t - hs) > 1e-14 * max(1.0, abs(t_end)) else t_end
            y, fy = y_new, k[6]
            out.append((t, y[0], y[1]))
            steps += 1
            fac = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.2)
            h *= fac
            if bound is not None and math.hypot(y[0], y[1]) > bound:
                reason = LEFT_WINDOW
                break
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
    if reason == STEP_FAILURE and strict:
        raise StepFailure(f"step size underflow at t={t:.6g}, y={y}")
    return Trajectory(np.array(out), reason)


def _initial_step(f, y, fy, rtol, atol, span) -> float:
    scale = atol + np.abs(y) * rtol
    d0 = float(np.linalg.norm(y / scale)) / math.sqrt(y.size)
    d1 = float(np.linalg.norm(fy / scale)) / math.sqrt(y.size)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y + h0 * fy
    d2 = float(np.linalg.norm((np.asarray(f(y1)) - fy) / scale)) / math.sqrt(y.size) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)
