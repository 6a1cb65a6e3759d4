"""Exact rational polynomial algebra in one and two variables.

Coefficients are :class:`fractions.Fraction` throughout (aliased ``Rat``);
floats appear only in the ``eval_float`` helpers and in root finding.

The bivariate ring uses the variables ``v`` (first slot) and ``x`` (second
slot).  Chart systems reuse the same two slots under different display names.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

from .errors import PreconditionViolated, TruncationTooLow

Rat = Fraction

#: degree of the zero polynomial; compares below every integer
NEG_INF = float("-inf")


def rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        # exact binary value; callers wanting decimal semantics pass strings
        return Fraction(value)
    raise TypeError(f"cannot convert {value!r} to a rational")


def rat_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# univariate
# ---------------------------------------------------------------------------

class UniPoly:
    """Dense univariate polynomial with exact coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def const(cls, c) -> "UniPoly":
        return cls([c])

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly.const(other)
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("UniPoly", self.coeffs))

    def __repr__(self):
        return f"UniPoly({self})"

    def __str__(self):
        return self.to_str()

    def to_str(self, var: str = "x") -> str:
        return BiPoly.from_uni(self).to_str(("v", var))

    @staticmethod
    def _lift(other) -> "UniPoly":
        return other if isinstance(other, UniPoly) else UniPoly.const(other)

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, BiPoly):
            return NotImplemented
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = UniPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def diff(self) -> "UniPoly":
        return UniPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def eval_rat(self, x0) -> Fraction:
        x0 = rat(x0)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x0 + c
        return acc

    def eval_float(self, x0):
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x0 + float(c)
        return acc

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = len(other.coeffs) - 1
        q = [Fraction(0)] * max(len(rem) - dq, 0)
        lead = other.lead()
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] / lead
            q[k - dq] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * b
        return UniPoly(q), UniPoly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other):
        return self.divmod(self._lift(other))[0]

    def __mod__(self, other):
        return self.divmod(self._lift(other))[1]

    def monic(self) -> "UniPoly":
        return self * (1 / self.lead()) if self.coeffs else self

    def real_roots(self, tol: float = 1e-9) -> list:
        """Real roots: exact ``Fraction`` where rational, ``float`` otherwise.

        Rational roots are found by the rational-root test and deflated out;
        whatever remains goes to ``numpy.roots``.  Multiple roots are reported
        once.
        """
        if self.is_zero():
            raise PreconditionViolated("roots of the zero polynomial")
        exact: list[Fraction] = []
        rest = self
        for r in rational_roots(self):
            exact.append(r)
            lin = UniPoly([-r, 1])
            while True:
                q, rem = rest.divmod(lin)
                if not rem.is_zero():
                    break
                rest = q
        floats: list[float] = []
        if rest.degree >= 1:
            cs = [float(c) for c in reversed(rest.coeffs)]
            for z in np.roots(cs):
                if abs(z.imag) <= tol * max(1.0, abs(z.real)):
                    xr = float(z.real)
                    if all(abs(xr - y) > tol * max(1.0, abs(y)) for y in floats):
                        floats.append(xr)
        return sorted(exact + floats, key=float)


def uni_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over Q (the gcd of two zero polynomials is zero)."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def _int_divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def rational_roots(p: UniPoly, max_divisor: int = 10**8) -> list[Fraction]:
    """Distinct rational roots of ``p`` by the rational-root test."""
    if p.is_zero():
        raise PreconditionViolated("roots of the zero polynomial")
    roots: list[Fraction] = []
    cs = list(p.coeffs)
    shift = 0
    while cs and cs[0] == 0:
        cs.pop(0)
        shift += 1
    if shift:
        roots.append(Fraction(0))
    if len(cs) <= 1:
        return roots
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in cs), 1)
    ints = [int(c * den) for c in cs]
    a0, an = ints[0], ints[-1]
    if abs(a0) > max_divisor or abs(an) > max_divisor:
        return roots
    q = UniPoly(cs)
    for pn in _int_divisors(a0):
        for qd in _int_divisors(an):
            for cand in (Fraction(pn, qd), Fraction(-pn, qd)):
                if cand not in roots and q.eval_rat(cand) == 0:
                    roots.append(cand)
    return sorted(roots)


# ---------------------------------------------------------------------------
# bivariate
# ---------------------------------------------------------------------------

Monomial = tuple[int, int]


class BiPoly:
    """Sparse polynomial in ``(v, x)``: a map ``(i, j) -> coeff`` of ``v^i x^j``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: dict[Monomial, Fraction] = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in monomial {(i, j)}")
            c = rat(c)
            if c:
                clean[(int(i), int(j))] = clean.get((int(i), int(j)), Fraction(0)) + c
        self.terms: dict[Monomial, Fraction] = {k: c for k, c in clean.items() if c}
        self._hash = None

    # construction -----------------------------------------------------------------
    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def v(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def x(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    @classmethod
    def from_uni(cls, p: UniPoly, var: str = "x") -> "BiPoly":
        if var == "x":
            return cls({(0, k): c for k, c in enumerate(p.coeffs)})
        if var == "v":
            return cls({(k, 0): c for k, c in enumerate(p.coeffs)})
        raise ValueError(f"unknown variable {var!r}")

    # structure --------------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self):
        return max((i + j for i, j in self.terms), default=NEG_INF)

    def degree_in(self, var: str):
        k = 0 if var == "v" else 1
        return max((m[k] for m in self.terms), default=NEG_INF)

    def coeff(self, i: int, j: int) -> Fraction:
        return self.terms.get((i, j), Fraction(0))

    def homogeneous_part(self, d: int) -> "BiPoly":
        return BiPoly({m: c for m, c in self.terms.items() if sum(m) == d})

    def low_order(self, d: int) -> "BiPoly":
        """Terms of total degree strictly below ``d``."""
        return BiPoly({m: c for m, c in self.terms.items() if sum(m) < d})

    def coeffs_in_v(self) -> list[UniPoly]:
        """Coefficients of ``v^0, v^1, ...`` as polynomials in ``x``."""
        if self.is_zero():
            return []
        out: list[dict[int, Fraction]] = [dict() for _ in range(int(self.degree_in("v")) + 1)]
        for (i, j), c in self.terms.items():
            out[i][j] = c
        return [UniPoly([d.get(k, 0) for k in range(max(d, default=-1) + 1)]) for d in out]

    def as_uni(self, var: str = "x") -> UniPoly:
        """View a polynomial in one variable as a :class:`UniPoly`."""
        other = 0 if var == "x" else 1
        if any(m[other] for m in self.terms):
            raise ValueError(f"polynomial depends on more than {var!r}")
        k = 1 if var == "x" else 0
        deg = max((m[k] for m in self.terms), default=-1)
        return UniPoly([self.terms.get((0, d) if var == "x" else (d, 0), 0) for d in range(deg + 1)])

    def content(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        num = reduce(math.gcd, (c.numerator for c in self.terms.values()))
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in self.terms.values()))
        return Fraction(num, den)

    # comparisons ------------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BiPoly.const(other)
        elif isinstance(other, UniPoly):
            other = BiPoly.from_uni(other)
        return isinstance(other, BiPoly) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # ring operations --------------------------------------------------------------
    @staticmethod
    def _lift(other) -> "BiPoly":
        if isinstance(other, BiPoly):
            return other
        if isinstance(other, UniPoly):
            return BiPoly.from_uni(other)
        return BiPoly.const(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict[Monomial, Fraction] = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, Fraction(0)) + a * b
        return BiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out, base = BiPoly.const(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "BiPoly":
        c = rat(c)
        return BiPoly({m: c * a for m, a in self.terms.items()})

    def diff(self, var: str) -> "BiPoly":
        if var == "v":
            return BiPoly({(i - 1, j): i * c for (i, j), c in self.terms.items() if i})
        if var == "x":
            return BiPoly({(i, j - 1): j * c for (i, j), c in self.terms.items() if j})
        raise ValueError(f"unknown variable {var!r}")

    # evaluation -------------------------------------------------------------------
    def eval_rat(self, v0, x0) -> Fraction:
        v0, x0 = rat(v0), rat(x0)
        return sum((c * v0**i * x0**j for (i, j), c in self.terms.items()), Fraction(0))

    def eval_float(self, v0, x0):
        """Floating evaluation; also accepts complex inputs or numpy arrays."""
        acc = 0.0
        for (i, j), c in self.terms.items():
            acc = acc + float(c) * v0**i * x0**j
        return acc

    def substitute(self, v=None, x=None) -> "BiPoly":
        """Replace ``v`` and/or ``x`` by bivariate polynomials."""
        sv = self._lift(v) if v is not None else BiPoly.v()
        sx = self._lift(x) if x is not None else BiPoly.x()
        vp: dict[int, BiPoly] = {}
        xp: dict[int, BiPoly] = {}
        out = BiPoly()
        for (i, j), c in self.terms.items():
            if i not in vp:
                vp[i] = sv**i
            if j not in xp:
                xp[j] = sx**j
            out = out + (vp[i] * xp[j]).scale(c)
        return out

    def lambdify(self):
        """Return a fast float callable ``f(v, x)``."""
        items = [(float(c), i, j) for (i, j), c in self.terms.items()]

        def f(v0, x0):
            acc = 0.0
            for c, i, j in items:
                acc += c * v0**i * x0**j
            return acc

        return f

    # division ---------------------------------------------------------------------
    def leading_monomial(self) -> Monomial:
        """Leading monomial in lex order with ``v > x``."""
        return max(self.terms)

    def divmod_lex(self, f: "BiPoly") -> tuple["BiPoly", "BiPoly"]:
        """Multivariate division by a single divisor in lex order ``v > x``.

        Returns ``(q, r)`` with ``self = q*f + r`` and no term of ``r``
        divisible by the leading monomial of ``f``.  For a single divisor the
        remainder vanishes exactly when ``f`` divides ``self``.
        """
        if f.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lm = f.leading_monomial()
        lc = f.terms[lm]
        q: dict[Monomial, Fraction] = {}
        r: dict[Monomial, Fraction] = {}
        p = BiPoly(self.terms)
        while p.terms:
            m = p.leading_monomial()
            c = p.terms[m]
            if m[0] >= lm[0] and m[1] >= lm[1]:
                mq = (m[0] - lm[0], m[1] - lm[1])
                cq = c / lc
                q[mq] = q.get(mq, Fraction(0)) + cq
                p = p - BiPoly({mq: cq}) * f
            else:
                r[m] = c
                p = BiPoly({k: a for k, a in p.terms.items() if k != m})
        return BiPoly(q), BiPoly(r)

    # formatting -------------------------------------------------------------------
    def sorted_monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=lambda m: (-(m[0] + m[1]), -m[0]))

    def to_str(self, names: tuple[str, str] = ("v", "x")) -> str:
        """Compact human/machine form, e.g. ``2vx+(1/3)v^2-1``; parseable by :func:`parse_bipoly`."""
        if not self.terms:
            return "0"
        parts = []
        for k, (i, j) in enumerate(self.sorted_monomials()):
            c = self.terms[(i, j)]
            sign = "-" if c < 0 else ("+" if k else "")
            a = abs(c)
            mono = ""
            for name, e in ((names[0], i), (names[1], j)):
                if e == 1:
                    mono += name
                elif e > 1:
                    mono += f"{name}^{e}"
            if a.denominator != 1:
                cs = f"({rat_str(a)})"
            elif a == 1 and mono:
                cs = ""
            else:
                cs = str(a.numerator)
            parts.append(f"{sign}{cs}{mono}")
        return "".join(parts)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"BiPoly({self.to_str()!r})"


def bi(expr: str | int | Fraction | BiPoly, names: tuple[str, str] = ("v", "x")) -> BiPoly:
    """Convenience coercion: strings are parsed, numbers become constants."""
    if isinstance(expr, BiPoly):
        return expr
    if isinstance(expr, str):
        return parse_bipoly(expr, names)
    return BiPoly.const(expr)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


def parse_bipoly(text: str, names: tuple[str, str] = ("v", "x")) -> BiPoly:
    """Parse a polynomial expression in two named variables.

    Accepts ``+ - * / ^ **``, parentheses and implicit multiplication, so both
    ``"2vx+(1/3)v^2"`` and ``"2*v*x + v**2/3"`` work.  Division is allowed by
    constants only.
    """
    tokens: list[tuple[str, str]] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif ident is not None:
            # glued names such as "vx" split into single letters when both are variables
            if ident in names:
                tokens.append(("var", ident))
            elif all(ch in names for ch in ident):
                tokens.extend(("var", ch) for ch in ident)
            else:
                raise ValueError(f"unknown symbol {ident!r} (variables are {names})")
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    tokens.append(("end", ""))
    idx = 0

    def peek():
        return tokens[idx]

    def take():
        nonlocal idx
        tok = tokens[idx]
        idx += 1
        return tok

    def expr() -> BiPoly:
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        acc = term().scale(sign)
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term() -> BiPoly:
        acc = power()
        while True:
            tok = peek()
            if tok == ("op", "*"):
                take()
                acc = acc * power()
            elif tok == ("op", "/"):
                take()
                d = power()
                if d.total_degree != 0:
                    raise ValueError("division by a non-constant polynomial")
                acc = acc.scale(1 / d.coeff(0, 0))
            elif tok[0] in ("num", "var") or tok == ("op", "("):
                acc = acc * power()
            else:
                return acc

    def power() -> BiPoly:
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, val = take()
            if kind != "num":
                raise ValueError("exponent must be a non-negative integer")
            base = base ** int(val)
        return base

    def atom() -> BiPoly:
        kind, val = take()
        if kind == "num":
            return BiPoly.const(int(val))
        if kind == "var":
            return BiPoly.v() if val == names[0] else BiPoly.x()
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise ValueError("unbalanced parentheses")
            return inner
        if (kind, val) == ("op", "-"):
            return -power()
        raise ValueError(f"unexpected token {val!r}")

    out = expr()
    if peek()[0] != "end":
        raise ValueError(f"trailing input in polynomial: {peek()[1]!r}")
    return out


# ---------------------------------------------------------------------------
# truncated power series
# ---------------------------------------------------------------------------

DEFAULT_ORDER = 12


@dataclass(frozen=True)
class PowerSeries:
    """Power series in one variable truncated after ``t^order``."""

    coeffs: tuple[Fraction, ...]
    order: int

    def __init__(self, coeffs: Iterable = (), order: int = DEFAULT_ORDER):
        cs = [rat(c) for c in coeffs][: order + 1]
        cs += [Fraction(0)] * (order + 1 - len(cs))
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "order", int(order))

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER) -> "PowerSeries":
        return cls([0, 1], order)

    @classmethod
    def const(cls, c, order: int = DEFAULT_ORDER) -> "PowerSeries":
        return cls([c], order)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k <= self.order else Fraction(0)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: "PowerSeries"):
        if other.order != self.order:
            raise ValueError("series truncated at different orders")

    def __add__(self, other):
        if not isinstance(other, PowerSeries):
            other = PowerSeries.const(other, self.order)
        self._check(other)
        return PowerSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries([-a for a in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            c = rat(other)
            return PowerSeries([c * a for a in self.coeffs], self.order)
        self._check(other)
        n = self.order
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(n + 1 - i):
                    b = other.coeffs[j]
                    if b:
                        out[i + j] += a * b
        return PowerSeries(out, n)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = PowerSeries.const(1, self.order)
        for _ in range(k):
            out = out * self
        return out

    def leading(self) -> tuple[int, Fraction] | None:
        """``(m, a_m)`` for the first nonzero coefficient, ``None`` if zero to this order."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k, c
        return None

    def leading_term(self) -> tuple[int, Fraction]:
        lt = self.leading()
        if lt is None:
            raise TruncationTooLow(f"series vanishes through order {self.order}")
        return lt

    def __str__(self):
        terms = [f"{rat_str(c)}*t^{k}" for k, c in enumerate(self.coeffs) if c]
        return (" + ".join(terms) or "0") + f" + O(t^{self.order + 1})"


def compose_series(outer: BiPoly, inner: PowerSeries, into_var: str = "x") -> PowerSeries:
    """Substitute ``inner(t)`` for ``into_var`` and ``t`` for the other variable.

    With ``into_var="x"`` this is ``t -> outer(t, inner(t))``.
    """
    n = inner.order
    t = PowerSeries.identity(n)
    ipow = [PowerSeries.const(1, n)]
    tpow = [PowerSeries.const(1, n)]
    out = PowerSeries((), n)
    for (i, j), c in outer.terms.items():
        k_inner, k_t = (j, i) if into_var == "x" else (i, j)
        while len(ipow) <= k_inner:
            ipow.append(ipow[-1] * inner)
        while len(tpow) <= k_t:
            tpow.append(tpow[-1] * t)
        out = out + ipow[k_inner] * tpow[k_t] * c
    return out


def solve_implicit_series(lin, B: BiPoly, order: int = DEFAULT_ORDER) -> PowerSeries:
    """Formal solution ``y = f(t)``, ``f(0) = 0``, of ``lin*y + B(t, y) = 0``.

    ``t`` sits in the ``v`` slot of ``B`` and ``y`` in the ``x`` slot.  The
    coefficients follow by undetermined coefficients: since ``B`` starts at
    degree two, the ``t^k`` coefficient of ``B(t, f)`` only involves ``f``'s
    coefficients below ``k``.
    """
    lin = rat(lin)
    if lin == 0:
        raise PreconditionViolated("linear coefficient must be nonzero")
    if not B.low_order(2).is_zero():
        raise PreconditionViolated(f"B has constant or linear terms: {B.low_order(2)}")
    coeffs = [Fraction(0)] * (order + 1)
    for k in range(1, order + 1):
        partial = PowerSeries(coeffs, order)
        coeffs[k] = -compose_series(B, partial, "x")[k] / lin
    return PowerSeries(coeffs, order)
