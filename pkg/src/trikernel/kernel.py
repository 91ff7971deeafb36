"""Kernel coefficients, discriminants, branch points and the algebraic branches Y and X."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ClassificationFailure, LeadingCoefficientVanishes, StepsTooLarge, ValidationError
from .model import StepSet
from .pseries import DEFAULT_ORDER, PuiseuxSeries, T, puiseux_roots

INF = math.inf


class TPoly:
    """Polynomial in one variable ``v`` whose coefficients are polynomials in ``t``.

    ``terms[(k, m)]`` is the coefficient of ``v^k t^m``.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {(int(k), int(m)): Fraction(c) for (k, m), c in (terms or {}).items() if c}

    def __add__(self, other: "TPoly") -> "TPoly":
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return TPoly(out)

    def __neg__(self):
        return TPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TPoly({k: c * other for k, c in self.terms.items()})
        out: dict = {}
        for (k1, m1), c1 in self.terms.items():
            for (k2, m2), c2 in other.terms.items():
                key = (k1 + k2, m1 + m2)
                out[key] = out.get(key, 0) + c1 * c2
        return TPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, TPoly) and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((k for k, _ in self.terms), default=-1)

    def derivative(self) -> "TPoly":
        return TPoly({(k - 1, m): c * k for (k, m), c in self.terms.items() if k})

    def coefficients(self, t) -> list:
        """Coefficients in ``v`` (lowest degree first) at a numeric or exact ``t``."""
        deg = self.degree()
        out = [0] * (deg + 1)
        for (k, m), c in self.terms.items():
            out[k] = out[k] + (c if isinstance(t, Fraction) else float(c)) * t**m
        return out

    def series_coefficients(self) -> list[PuiseuxSeries]:
        deg = self.degree()
        out = [PuiseuxSeries({}) for _ in range(deg + 1)]
        for (k, m), c in self.terms.items():
            out[k] = out[k] + PuiseuxSeries({m: c})
        return out

    def __call__(self, v, t):
        """Evaluate at numeric (scalar or array) ``v`` or at series ``v`` and ``t``."""
        coeffs = self.coefficients(t) if not isinstance(t, PuiseuxSeries) else None
        if coeffs is None:
            total = PuiseuxSeries({})
            for (k, m), c in self.terms.items():
                total = total + c * (v**k) * (t**m)
            return total
        acc = 0
        for c in reversed(coeffs):
            acc = acc * v + c
        return acc

    def pretty(self, var: str = "x") -> str:
        parts = []
        for (k, m), c in sorted(self.terms.items()):
            mono = "".join(s for s in ("" if m == 0 else ("t" if m == 1 else f"t^{m}"),
                                       "" if k == 0 else (var if k == 1 else f"{var}^{k}")))
            coef = "" if (c == 1 and mono) else ("-" if (c == -1 and mono) else str(c))
            parts.append(f"{coef}{mono}" or "1")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def __repr__(self):
        return f"TPoly({self.pretty()})"


@dataclass(frozen=True)
class KernelData:
    """Coefficients of ``K(x,y) = xy(t * sum x^i y^j - 1)`` in both variables."""

    steps: StepSet
    t: object
    a: TPoly
    b: TPoly
    c: TPoly
    at: TPoly
    bt: TPoly
    ct: TPoly
    d: TPoly = field(init=False)
    dt: TPoly = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "d", self.b * self.b - 4 * self.a * self.c)
        object.__setattr__(self, "dt", self.bt * self.bt - 4 * self.at * self.ct)

    def K(self, x, y, t=None):
        t = self.t if t is None else t
        return self.a(x, t) * y * y + self.b(x, t) * y + self.c(x, t)

    def with_t(self, t) -> "KernelData":
        return KernelData(self.steps, t, self.a, self.b, self.c, self.at, self.bt, self.ct)

    def to_json(self) -> dict:
        return {
            "steps": [list(s) for s in self.steps],
            "a": self.a.pretty("x"), "b": self.b.pretty("x"), "c": self.c.pretty("x"),
            "a~": self.at.pretty("y"), "b~": self.bt.pretty("y"), "c~": self.ct.pretty("y"),
            "d": self.d.pretty("x"), "d~": self.dt.pretty("y"),
        }


def _coeff(steps, fixed_axis: int, value: int, shift_minus: bool) -> TPoly:
    """``t v sum_{step[fixed_axis] == value} v^{other}`` (minus ``v`` when requested)."""
    other = 1 - fixed_axis
    terms: dict = {}
    for s in steps:
        if s[fixed_axis] == value:
            key = (s[other] + 1, 1)
            terms[key] = terms.get(key, 0) + 1
    if shift_minus:
        terms[(1, 0)] = terms.get((1, 0), 0) - 1
    return TPoly(terms)


def build_kernel(steps: StepSet, t=None) -> KernelData:
    """Kernel coefficients for the (already transformed) step set."""
    if not steps.is_small():
        raise StepsTooLarge(f"{steps.label()} has steps outside {{-1,0,1}}^2")
    a = _coeff(steps, 1, 1, False)
    b = _coeff(steps, 1, 0, True)
    c = _coeff(steps, 1, -1, False)
    at = _coeff(steps, 0, 1, False)
    bt = _coeff(steps, 0, 0, True)
    ct = _coeff(steps, 0, -1, False)
    kd = KernelData(steps, t, a, b, c, at, bt, ct)
    _check_cross_identity(kd)
    return kd


def _check_cross_identity(kd: KernelData) -> None:
    """Both expansions must equal the kernel as polynomials in x, y, t."""
    direct: dict = {}
    for i, j in kd.steps:
        direct[(i + 1, j + 1, 1)] = direct.get((i + 1, j + 1, 1), 0) + 1
    direct[(1, 1, 0)] = direct.get((1, 1, 0), 0) - 1
    by_y: dict = {}
    for power, poly in ((2, kd.a), (1, kd.b), (0, kd.c)):
        for (k, m), c in poly.terms.items():
            by_y[(k, power, m)] = by_y.get((k, power, m), 0) + c
    by_x: dict = {}
    for power, poly in ((2, kd.at), (1, kd.bt), (0, kd.ct)):
        for (k, m), c in poly.terms.items():
            by_x[(power, k, m)] = by_x.get((power, k, m), 0) + c
    clean = lambda d: {k: v for k, v in d.items() if v}  # noqa: E731
    if not (clean(direct) == clean(by_y) == clean(by_x)):
        raise ValidationError("kernel expansions disagree")


# numeric branch points


@dataclass(frozen=True)
class BranchPoints:
    """``x1..x4`` (roots of d) and ``y1..y4`` (roots of d~); ``INF`` marks a missing root."""

    x: tuple
    y: tuple
    t: object = None
    mode: str = "numeric"

    @property
    def x1(self):
        return self.x[0]

    @property
    def x2(self):
        return self.x[1]

    @property
    def x3(self):
        return self.x[2]

    @property
    def x4(self):
        return self.x[3]

    @property
    def y1(self):
        return self.y[0]

    @property
    def y2(self):
        return self.y[1]

    @property
    def y3(self):
        return self.y[2]

    @property
    def y4(self):
        return self.y[3]

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, PuiseuxSeries):
                return v.pretty()
            if v is None:
                return None
            return "inf" if v == INF else float(v)

        return {"x": [enc(v) for v in self.x], "y": [enc(v) for v in self.y], "mode": self.mode}


def _polish(coeffs: Sequence[float], r: complex, steps: int = 3) -> complex:
    p = np.poly1d(list(reversed(coeffs)))
    dp = p.deriv()
    for _ in range(steps):
        dv = dp(r)
        if dv == 0:
            break
        step = p(r) / dv
        r = r - step
        if abs(step) < 1e-17 * max(1.0, abs(r)):
            break
    return r


def _classify(poly: TPoly, t: float) -> tuple:
    coeffs = [float(c) for c in poly.coefficients(t)]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    deg = len(coeffs) - 1
    if deg < 3:
        raise ClassificationFailure(f"discriminant has degree {deg}, expected 3 or 4")
    zero_roots = 0
    while coeffs[0] == 0:
        coeffs.pop(0)
        zero_roots += 1
    roots = list(np.roots(list(reversed(coeffs)))) if len(coeffs) > 1 else []
    roots = [_polish(coeffs, complex(r)) for r in roots] + [0j] * zero_roots
    scale = max(1.0, max(abs(r) for r in roots))
    if any(abs(r.imag) > 1e-9 * scale for r in roots):
        raise ClassificationFailure(f"non-real branch points {roots} at t={t}")
    real = sorted(r.real for r in roots)
    inside = [r for r in real if abs(r) < 1]
    outside = [r for r in real if abs(r) >= 1]
    if len(inside) != 2 or len(set(real)) != len(real):
        raise ClassificationFailure(f"expected two distinct roots in the unit disc, got {real}")
    r1, r2 = inside
    if not r2 > 0:
        raise ClassificationFailure("largest small branch point must be positive")
    pos = [r for r in outside if r > 1]
    if not pos:
        raise ClassificationFailure(f"no branch point beyond 1 among {outside}")
    r3 = min(pos)
    rest = [r for r in outside if r != r3]
    r4 = rest[0] if rest else INF
    # sign conditions: d < 0 on (r1, r2) and on (r3, r4), wrapping through infinity if r4 < 0
    p = lambda v: sum(c * v**k for k, c in enumerate(coeffs)) * v**zero_roots  # noqa: E731
    probes = [(r1 + r2) / 2]
    if r4 == INF:
        probes.append(r3 + 1.0)
    elif r4 > r3:
        probes.append((r3 + r4) / 2)
    else:
        probes += [r3 + 1.0, r4 - 1.0]
    if any(p(v) >= 0 for v in probes):
        raise ClassificationFailure("discriminant sign pattern does not match the branch point layout")
    if not p((r2 + r3) / 2) > 0:
        raise ClassificationFailure("discriminant must be positive on (r2, r3)")
    return (r1, r2, r3, r4)


def branch_points_numeric(kd: KernelData, t: float | None = None) -> BranchPoints:
    """Real branch points for ``0 < t < 1/|S|``, sorted and classified."""
    t = float(kd.t if t is None else t)
    if not 0 < t < 1 / len(kd.steps):
        raise ClassificationFailure(f"t={t} outside (0, 1/{len(kd.steps)})")
    return BranchPoints(_classify(kd.d, t), _classify(kd.dt, t), t)


# series branch points


def _series_roots(poly: TPoly, order) -> tuple:
    coeffs = poly.series_coefficients()
    roots = puiseux_roots(coeffs, order)
    small = [r for r in roots if r.is_zero() or r.lead_exponent > 0]
    large = [r for r in roots if not r.is_zero() and r.lead_exponent < 0]
    if len(small) != 2:
        raise ClassificationFailure(f"expected two small series roots, found {len(small)}")
    diff = small[1] - small[0]
    if diff.is_zero():
        raise ClassificationFailure("small roots coincide to the computed order")
    if diff.lead_coefficient < 0:
        small.reverse()
    large.sort(key=lambda r: -r.lead_coefficient)
    degree = poly.degree()
    while len(large) < degree - 2:
        large.append(INF if degree == 3 else None)
    if degree == 3:
        large = large[:1] + [INF]
    return tuple(small + large[:2])


def branch_points_series(kd: KernelData, order=DEFAULT_ORDER) -> BranchPoints:
    """Puiseux expansions of the branch points (large roots when rational)."""
    return BranchPoints(_series_roots(kd.d, order), _series_roots(kd.dt, order), None, "series")


def branch_value_series(kd: KernelData, x: PuiseuxSeries, variable: str = "x") -> PuiseuxSeries:
    """The double root ``Y(x_i) = -b(x_i) / (2 a(x_i))`` at a branch point."""
    if variable == "x":
        return -kd.b(x, T) / (2 * kd.a(x, T))
    return -kd.bt(x, T) / (2 * kd.at(x, T))


# square roots of the discriminants and the two branches


def _pair_root(v, r, s):
    """Analytic ``sqrt((v - r)(v - s))`` with its cut on the segment [r, s] (through infinity
    when the pair straddles it) or, for ``s = INF``, ``sqrt(r - v)`` with cut [r, +inf)."""
    if s == INF:
        return np.sqrt(r - v + 0j)
    if r <= s:
        m, h = (r + s) / 2, (s - r) / 2
        u = v - m
        with np.errstate(divide="ignore", invalid="ignore"):
            return u * np.sqrt(1 - (h / u) ** 2 + 0j)
    # r > 0 > s: the cut runs from r to +inf and from -inf to s
    return np.sqrt(r - v + 0j) * np.sqrt(v - s + 0j)


class DiscriminantRoot:
    """``sqrt(d)`` analytic off the cuts [r1, r2] and [r3, r4], positive on (r2, r3)."""

    def __init__(self, poly: TPoly, t: float, roots: tuple):
        self.poly = poly
        self.t = t
        self.roots = roots
        r1, r2, r3, r4 = roots
        mid = (r2 + r3) / 2
        base = _pair_root(mid, r1, r2) * _pair_root(mid, r3, r4)
        self.factor = np.sqrt(float(poly(mid, t))) / base

    def __call__(self, v):
        r1, r2, r3, r4 = self.roots
        v = np.asarray(v, dtype=complex)
        out = self.factor * _pair_root(v, r1, r2) * _pair_root(v, r3, r4)
        return out if out.ndim else complex(out)


@dataclass
class KernelAtT:
    """Kernel data with numeric branch points and discriminant roots at a fixed t."""

    kd: KernelData
    t: float
    bp: BranchPoints
    sqrt_d: DiscriminantRoot
    sqrt_dt: DiscriminantRoot

    def a(self, x):
        return self.kd.a(x, self.t)

    def b(self, x):
        return self.kd.b(x, self.t)

    def c(self, x):
        return self.kd.c(x, self.t)

    def at(self, y):
        return self.kd.at(y, self.t)

    def bt(self, y):
        return self.kd.bt(y, self.t)

    def ct(self, y):
        return self.kd.ct(y, self.t)

    def d(self, x):
        return self.kd.d(x, self.t)

    def dt(self, y):
        return self.kd.dt(y, self.t)

    def dt_prime(self, y):
        return self.kd.dt.derivative()(y, self.t)

    def K(self, x, y):
        return self.kd.K(x, y, self.t)

    def Y_analytic(self, x, sign: int = -1):
        """``(-b(x) + sign * sqrt(d(x))) / (2 a(x))`` with the fixed determination of sqrt(d)."""
        x = np.asarray(x, dtype=complex)
        return (-self.b(x) + sign * self.sqrt_d(x)) / (2 * self.a(x))

    def X_analytic(self, y, sign: int = -1):
        y = np.asarray(y, dtype=complex)
        return (-self.bt(y) + sign * self.sqrt_dt(y)) / (2 * self.at(y))

    def Y_at_x1(self):
        x1 = self.bp.x1
        a = self.a(x1)
        if abs(a) < 1e-300:
            return INF
        return -self.b(x1) / (2 * a)

    def Y_at_x2(self):
        x2 = self.bp.x2
        return -self.b(x2) / (2 * self.a(x2))


def at_t(kd: KernelData, t: float) -> KernelAtT:
    t = float(t)
    kd_t = kd.with_t(t)
    bp = branch_points_numeric(kd_t, t)
    return KernelAtT(kd_t, t, bp, DiscriminantRoot(kd.d, t, bp.x), DiscriminantRoot(kd.dt, t, bp.y))


def _ordered_roots(A, B, C):
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    C = np.asarray(C, dtype=complex)
    disc = np.sqrt(B * B - 4 * A * C)
    # stable pair: the larger-magnitude root first, the other from the product
    q = -(B + np.where((np.conj(B) * disc).real >= 0, disc, -disc)) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        r_big = q / A
        r_small = C / q
    small_first = np.abs(r_small) <= np.abs(r_big)
    r0 = np.where(small_first, r_small, r_big)
    r1 = np.where(small_first, r_big, r_small)
    tie = np.isclose(np.abs(r0), np.abs(r1), rtol=1e-12, atol=0) & (r0.imag < r1.imag)
    r0, r1 = np.where(tie, r1, r0), np.where(tie, r0, r1)
    return r0, r1


def Y_branches(kd: KernelData, x, t=None):
    """Roots of ``a(x) y^2 + b(x) y + c(x)``, ordered ``|Y0| <= |Y1|`` (ties: Im Y0 >= 0)."""
    t = kd.t if t is None else t
    A, B, C = kd.a(x, t), kd.b(x, t), kd.c(x, t)
    if np.any(np.asarray(A) == 0):
        raise LeadingCoefficientVanishes("a(x) = 0: one branch is infinite",
                                         root=-np.asarray(C) / np.asarray(B))
    r0, r1 = _ordered_roots(A, B, C)
    if np.ndim(r0) == 0:
        return complex(r0), complex(r1)
    return r0, r1


def X_branches(kd: KernelData, y, t=None):
    """Roots of ``a~(y) x^2 + b~(y) x + c~(y)``, ordered ``|X0| <= |X1|``."""
    t = kd.t if t is None else t
    A, B, C = kd.at(y, t), kd.bt(y, t), kd.ct(y, t)
    if np.any(np.asarray(A) == 0):
        raise LeadingCoefficientVanishes("a~(y) = 0: one branch is infinite",
                                         root=-np.asarray(C) / np.asarray(B))
    r0, r1 = _ordered_roots(A, B, C)
    if np.ndim(r0) == 0:
        return complex(r0), complex(r1)
    return r0, r1
