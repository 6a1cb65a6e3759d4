"""The eight classical orthogonal-polynomial families of hypergeometric type.

Each family is a row ``(rho, tau, lambda_n)`` of the equation
``rho*y'' + tau*y' + lambda_n*y = 0``.  Polynomials are generated by their
three-term recurrences in exact arithmetic, in the usual normalizations
(Jacobi ``P_n^(a,b)``, Legendre ``P_n``, Chebyshev ``T_n`` and ``U_n``,
Gegenbauer ``C_n^(a)``, Laguerre ``L_n^(a)`` and ``L_n``, physicists' Hermite
``H_n``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import UnsupportedParams
from .exactpoly import UniPoly, rat, rat_str


class Family(str, Enum):
    JACOBI = "jacobi"
    LEGENDRE = "legendre"
    CHEBYSHEV_T = "chebyshev_t"
    CHEBYSHEV_U = "chebyshev_u"
    GEGENBAUER = "gegenbauer"
    LAGUERRE_ASSOC = "laguerre_assoc"
    LAGUERRE = "laguerre"
    HERMITE = "hermite"


_ALIASES = {
    "jacobi": Family.JACOBI,
    "legendre": Family.LEGENDRE,
    "chebyshevt": Family.CHEBYSHEV_T,
    "chebyshev_t": Family.CHEBYSHEV_T,
    "chebyshev-t": Family.CHEBYSHEV_T,
    "chebyshevu": Family.CHEBYSHEV_U,
    "chebyshev_u": Family.CHEBYSHEV_U,
    "chebyshev-u": Family.CHEBYSHEV_U,
    "gegenbauer": Family.GEGENBAUER,
    "laguerreassoc": Family.LAGUERRE_ASSOC,
    "laguerre_assoc": Family.LAGUERRE_ASSOC,
    "laguerre-assoc": Family.LAGUERRE_ASSOC,
    "associated_laguerre": Family.LAGUERRE_ASSOC,
    "laguerre": Family.LAGUERRE,
    "hermite": Family.HERMITE,
}

_USES = {
    Family.JACOBI: ("alpha", "beta"),
    Family.GEGENBAUER: ("alpha",),
    Family.LAGUERRE_ASSOC: ("alpha",),
}

_LAMBDA_RULE = {
    Family.JACOBI: "n(n+1+alpha+beta)",
    Family.LEGENDRE: "n(n+1)",
    Family.CHEBYSHEV_T: "n^2",
    Family.CHEBYSHEV_U: "n(n+2)",
    Family.GEGENBAUER: "n(n+2alpha)",
    Family.LAGUERRE_ASSOC: "n",
    Family.LAGUERRE: "n",
    Family.HERMITE: "2n",
}

INF = float("inf")


def family_id(name: str | Family) -> Family:
    if isinstance(name, Family):
        return name
    key = name.strip().lower().replace(" ", "_")
    try:
        return _ALIASES[key]
    except KeyError:
        raise UnsupportedParams(f"unknown family {name!r}") from None


@dataclass(frozen=True)
class FamilySpec:
    id: Family
    rho: UniPoly
    tau: UniPoly
    params: dict = field(default_factory=dict, hash=False)
    interval: tuple[float, float] = (-1.0, 1.0)

    @property
    def alpha(self) -> Fraction:
        return self.params.get("alpha", Fraction(0))

    @property
    def beta(self) -> Fraction:
        return self.params.get("beta", Fraction(0))

    @property
    def lambda_rule(self) -> str:
        return _LAMBDA_RULE[self.id]

    def key(self) -> tuple:
        return (self.id, tuple(sorted(self.params.items())))

    def to_json(self) -> dict:
        return {
            "id": self.id.value,
            "rho": self.rho.to_str(),
            "tau": self.tau.to_str(),
            "lambda_rule": self.lambda_rule,
            "params": {k: rat_str(v) for k, v in self.params.items()},
            "interval": [_endpoint(e) for e in self.interval],
        }


def _endpoint(e: float):
    if math.isinf(e):
        return "inf" if e > 0 else "-inf"
    return int(e) if float(e).is_integer() else e


def family(name: str | Family, alpha=None, beta=None) -> FamilySpec:
    """Build the table row for a family, validating its parameters.

    Parameters default to 0 where the family uses them and must be omitted
    otherwise.
    """
    fid = family_id(name)
    uses = _USES.get(fid, ())
    given = {"alpha": alpha, "beta": beta}
    for k, val in given.items():
        if val is not None and k not in uses:
            raise UnsupportedParams(f"{fid.value} takes no parameter {k}")
    a = rat(alpha) if alpha is not None else Fraction(0)
    b = rat(beta) if beta is not None else Fraction(0)
    one_minus_x2 = UniPoly([1, 0, -1])
    x = UniPoly.x()
    if fid is Family.JACOBI:
        if a <= -1 or b <= -1:
            raise UnsupportedParams("Jacobi needs alpha, beta > -1")
        return FamilySpec(fid, one_minus_x2, UniPoly([b - a, -(a + b + 2)]),
                          {"alpha": a, "beta": b}, (-1.0, 1.0))
    if fid is Family.LEGENDRE:
        return FamilySpec(fid, one_minus_x2, x * -2, {}, (-1.0, 1.0))
    if fid is Family.CHEBYSHEV_T:
        return FamilySpec(fid, one_minus_x2, -x, {}, (-1.0, 1.0))
    if fid is Family.CHEBYSHEV_U:
        return FamilySpec(fid, one_minus_x2, x * -3, {}, (-1.0, 1.0))
    if fid is Family.GEGENBAUER:
        if a <= Fraction(-1, 2):
            raise UnsupportedParams("Gegenbauer needs alpha > -1/2")
        return FamilySpec(fid, one_minus_x2, x * -(2 * a + 1), {"alpha": a}, (-1.0, 1.0))
    if fid is Family.LAGUERRE_ASSOC:
        if a <= -1:
            raise UnsupportedParams("associated Laguerre needs alpha > -1")
        return FamilySpec(fid, x, UniPoly([a + 1, -1]), {"alpha": a}, (0.0, INF))
    if fid is Family.LAGUERRE:
        return FamilySpec(fid, x, UniPoly([1, -1]), {}, (0.0, INF))
    return FamilySpec(fid, UniPoly.const(1), x * -2, {}, (-INF, INF))


def registry() -> list[FamilySpec]:
    """One row per family with default parameters, in table order."""
    return [family(f) for f in Family]


def lambda_n(spec: FamilySpec, n: int) -> Fraction:
    """``-n*(tau' + (n-1)/2 * rho'')``."""
    tau_p = spec.tau.diff()[0]
    rho_pp = spec.rho.diff().diff()[0]
    return -n * (tau_p + Fraction(n - 1, 2) * rho_pp)


@dataclass(frozen=True)
class OrthoPoly:
    family: FamilySpec
    n: int
    poly: UniPoly
    derivative: UniPoly


def poly_of(spec: FamilySpec, n: int) -> OrthoPoly:
    if n < 0:
        raise UnsupportedParams("degree must be non-negative")
    p = _generate(spec.id, spec.alpha, spec.beta, n)
    return OrthoPoly(spec, n, p, p.diff())


@lru_cache(maxsize=None)
def _generate(fid: Family, a: Fraction, b: Fraction, n: int) -> UniPoly:
    if n == 0:
        return UniPoly.const(1)
    x = UniPoly.x()
    if fid is Family.GEGENBAUER and a == 0:
        # C_n^(0) vanishes identically in the standard normalization;
        # use the conventional limit (2/n) T_n instead.
        return _generate(Family.CHEBYSHEV_T, Fraction(0), Fraction(0), n) * Fraction(2, n)
    prev, cur = UniPoly.const(1), _first(fid, a, b)
    for k in range(1, n):
        nxt = _step(fid, a, b, k, x, cur, prev)
        prev, cur = cur, nxt
    return cur


def _first(fid: Family, a: Fraction, b: Fraction) -> UniPoly:
    if fid is Family.JACOBI:
        return UniPoly([(a - b) / 2, (a + b + 2) / 2])
    if fid in (Family.LEGENDRE, Family.CHEBYSHEV_T):
        return UniPoly.x()
    if fid in (Family.CHEBYSHEV_U, Family.HERMITE):
        return UniPoly([0, 2])
    if fid is Family.GEGENBAUER:
        return UniPoly([0, 2 * a])
    if fid is Family.LAGUERRE_ASSOC:
        return UniPoly([1 + a, -1])
    return UniPoly([1, -1])  # Laguerre


def _step(fid, a, b, k, x, cur, prev) -> UniPoly:
    """Return the degree ``k+1`` member from degrees ``k`` and ``k-1``."""
    if fid is Family.JACOBI:
        n = k + 1
        s = 2 * n + a + b
        c1 = 2 * n * (n + a + b) * (s - 2)
        c2 = (s - 1) * (a * a - b * b)
        c3 = (s - 1) * s * (s - 2)
        c4 = 2 * (n + a - 1) * (n + b - 1) * s
        return ((cur * UniPoly([c2, c3])) - prev * c4) * (1 / c1)
    if fid is Family.LEGENDRE:
        return (x * cur * (2 * k + 1) - prev * k) * Fraction(1, k + 1)
    if fid in (Family.CHEBYSHEV_T, Family.CHEBYSHEV_U):
        return x * cur * 2 - prev
    if fid is Family.GEGENBAUER:
        return (x * cur * (2 * (k + a)) - prev * (k + 2 * a - 1)) * Fraction(1, k + 1)
    if fid in (Family.LAGUERRE_ASSOC, Family.LAGUERRE):
        return (cur * UniPoly([2 * k + 1 + a, -1]) - prev * (k + a)) * Fraction(1, k + 1)
    return x * cur * 2 - prev * (2 * k)  # Hermite


def ode_residual(p: OrthoPoly) -> UniPoly:
    """``rho*P'' + tau*P' + lambda_n*P``; identically zero for a correct ``P``."""
    spec = p.family
    return spec.rho * p.derivative.diff() + spec.tau * p.derivative + p.poly * lambda_n(spec, p.n)


def float_roots(p: OrthoPoly) -> np.ndarray:
    """Roots of ``P_n`` in floating point, sorted (complex if any are)."""
    if p.n == 0:
        return np.array([])
    cs = [float(c) for c in reversed(p.poly.coeffs)]
    r = np.roots(cs)
    if np.all(np.abs(r.imag) < 1e-9 * np.maximum(1, np.abs(r.real))):
        r = r.real
    return np.sort(r)
