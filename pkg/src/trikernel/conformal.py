"""Conformal gluing functions for the domain bounded by L, their re-poling, and the anti-Tutte pair."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import elliprf, roots_legendre

from .errors import (
    BranchPointImageInfinite,
    EvaluationAtPole,
    InversionOutsideFundamentalDomain,
    PoleAlreadyAtY2,
    QuadratureNotConverged,
    ValidationError,
)
from .kernel import INF, KernelAtT, KernelData, at_t
from .model import StepSet
from .pseries import DEFAULT_ORDER, PuiseuxSeries, T, solve_fixed_point, sqrt_series

# dual numbers: one formula yields the value and the derivative, over floats or series


class Dual:
    __slots__ = ("v", "d")

    def __init__(self, v, d):
        self.v = v
        self.d = d

    def __add__(self, o):
        if isinstance(o, Dual):
            return Dual(self.v + o.v, self.d + o.d)
        return Dual(self.v + o, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.v, -self.d)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(self.v * o.v, self.d * o.v + self.v * o.d)
        return Dual(self.v * o, self.d * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Dual):
            inv = 1 / o.v
            return Dual(self.v * inv, (self.d * o.v - self.v * o.d) * inv * inv)
        return Dual(self.v / o, self.d / o)

    def __rtruediv__(self, o):
        inv = 1 / self.v
        return Dual(o * inv, -o * self.d * inv * inv)

    def __pow__(self, n: int):
        out = Dual(1, 0) if n == 0 else self
        for _ in range(n - 1):
            out = out * self
        return out


def _dsqrt(x: Dual, sqrt: Callable) -> Dual:
    r = sqrt(x.v)
    return Dual(r, x.d / (2 * r))


# explicit gluing functions, each with its pole at 0


def _w_kreweras(y, p, sqrt):
    W = p["W"]
    return (1 / y - 1 / W) * _dsqrt(1 - y * W * W, sqrt)


def _w_reverse_kreweras(y, p, sqrt):
    W, t = p["W"], p["t"]
    poly = (-t * y**3 + y**2 + t) / (2 * y * t)
    radical = _dsqrt(1 - y * W * (W**3 + 4) / 4 + y * y * W * W / 4, sqrt)
    return poly - (2 * y * y - y * W * W - W) / (2 * y * W) * radical


def _w_double_kreweras(y, p, sqrt):
    Z = p["Z"]
    one_z = 1 - Z
    radical = _dsqrt(1 - 2 * y * Z * (1 + Z * Z) / one_z**2 + Z * Z * y * y, sqrt)
    first = radical * (Z * one_z + 2 * y * Z - one_z * y * y) / (2 * y * Z * one_z * (1 + y))
    num = (Z * one_z**2 - Z * Z * (-1 + 2 * Z + Z * Z) * y + (1 - 2 * Z + 7 * Z**2 - 4 * Z**3) * y * y
           - Z * one_z**2 * y**3)
    return first + num / (2 * y * (1 + y) * Z * one_z**2)


# points where an explicit formula has a removable 0/0 (a factor 1 + y in the denominator)
REMOVABLE = {"DoubleKrewerasExplicit": (-1.0,)}
REMOVABLE_GUARD, REMOVABLE_RADIUS, REMOVABLE_NODES = 1e-6, 1e-2, 64

EXPLICIT = {
    frozenset({(1, 1), (0, -1), (-1, 0)}): ("KrewerasExplicit", _w_kreweras, "W"),
    frozenset({(0, 1), (1, 0), (-1, -1)}): ("ReverseKrewerasExplicit", _w_reverse_kreweras, "W"),
    frozenset({(1, 1), (0, -1), (-1, 0), (0, 1), (1, 0), (-1, -1)}): ("DoubleKrewerasExplicit", _w_double_kreweras, "Z"),
}


def _solve_numeric(F: Callable[[float], float], tol=1e-16, max_iter=100000) -> float:
    v = 0.0
    for _ in range(max_iter):
        nv = F(v)
        if abs(nv - v) <= tol * max(1.0, abs(nv)):
            return nv
        v = nv
    raise QuadratureNotConverged("fixed point iteration did not converge")


def W_numeric(t: float) -> float:
    return _solve_numeric(lambda W: t * (2 + W**3))


def Z_numeric(t: float) -> float:
    return _solve_numeric(lambda Z: t * (1 - 2 * Z + 6 * Z**2 - 2 * Z**3 + Z**4) / (1 - Z) ** 2)


def W_series(order=DEFAULT_ORDER) -> PuiseuxSeries:
    return solve_fixed_point(lambda S: T * (2 + S**3), 0, order=order)


def Z_series(order=DEFAULT_ORDER) -> PuiseuxSeries:
    return solve_fixed_point(lambda S: T * (1 - 2 * S + 6 * S**2 - 2 * S**3 + S**4) / (1 - S) ** 2, 0, order=order)


@dataclass
class GluingMap:
    """A gluing function with its derivative, evaluatable at numbers or at series."""

    kind: str
    pole: object
    mode: str
    fn: Callable
    residue: object = None
    inner: "GluingMap | None" = None
    params: dict = field(default_factory=dict)

    def _check_pole(self, y):
        if self.mode == "numeric" and self.pole is not None and np.any(np.asarray(y) == self.pole):
            raise EvaluationAtPole(f"{self.kind} has a pole at {self.pole}")

    def both(self, y):
        """``(w(y), w'(y))``."""
        self._check_pole(y)
        if self.mode == "numeric":
            y = np.asarray(y, dtype=complex)
        return self.fn(y)

    def __call__(self, y):
        return self.both(y)[0]

    def derivative(self, y):
        return self.both(y)[1]


def _explicit_entry(steps: StepSet):
    key = frozenset(steps.steps)
    if key not in EXPLICIT:
        raise ValidationError(f"no explicit gluing function for {steps.label()}")
    return EXPLICIT[key]


def has_explicit(steps: StepSet) -> bool:
    return frozenset(steps.steps) in EXPLICIT


def gluing_explicit(steps: StepSet | KernelData, t=None, order=DEFAULT_ORDER) -> GluingMap:
    """Algebraic gluing function (pole at 0) for the Kreweras trilogy.

    ``t`` numeric gives a numeric map; ``t=None`` gives a series map in ``t``.
    """
    if isinstance(steps, KernelData):
        steps = steps.steps
    kind, formula, aux = _explicit_entry(steps)
    if t is None:
        params = {"t": T}
        if aux == "W":
            params["W"] = W_series(order + 4)
        elif aux == "Z":
            params["Z"] = Z_series(order + 4)
        sqrt = lambda v: sqrt_series(v, order=order + 4)  # noqa: E731
        mode = "series"

        def fn(y):
            one = PuiseuxSeries({0: 1})
            out = formula(Dual(y, one), params, sqrt)
            return out.v, out.d
    else:
        t = float(t)
        params = {"t": t}
        if aux == "W":
            params["W"] = W_numeric(t)
        elif aux == "Z":
            params["Z"] = Z_numeric(t)
        sqrt = lambda v: np.sqrt(v + 0j)  # noqa: E731
        mode = "numeric"

        def direct(y):
            out = formula(Dual(y, np.ones_like(y)), params, sqrt)
            return out.v, out.d

        def fn(y):
            y = np.asarray(y, dtype=complex)
            near = np.zeros(y.shape, dtype=bool)
            for p in REMOVABLE.get(kind, ()):
                near |= np.abs(y - p) < REMOVABLE_GUARD
            if not np.any(near):
                return direct(y)
            v, d = direct(np.where(near, 1j, y))
            # the formula is 0/0 there; the map is analytic, so take Cauchy means on a small circle
            u = np.exp(2j * np.pi * np.arange(REMOVABLE_NODES) / REMOVABLE_NODES)
            for idx in zip(*np.nonzero(near)):
                ring = y[idx] + REMOVABLE_RADIUS * u
                vr, _ = direct(ring)
                v[idx] = np.mean(vr)
                d[idx] = np.mean(vr / (REMOVABLE_RADIUS * u))
            return v, d
    return GluingMap(kind, 0, mode, fn, params=params)


def repole(w: GluingMap, y2, t=None) -> GluingMap:
    """``1/(w - w(y2))``: the same gluing property, with the pole moved to y2."""
    if w.pole is not None and w.mode == "numeric" and w.pole == y2:
        raise PoleAlreadyAtY2("the map already has its pole at y2")
    if w.mode == "numeric":
        y2 = complex(y2)
    w2, dw2 = w.both(y2)
    if w.mode == "numeric":
        w2, dw2 = complex(w2), complex(dw2)

    def plain(y):
        v, d = w.both(y)
        inv = 1 / (v - w2)
        return inv, -d * inv * inv

    def fn(y):
        if w.mode != "numeric" or w.pole is None:
            return plain(y)
        at_pole = np.asarray(y) == w.pole
        if not np.any(at_pole):
            return plain(y)
        # the inner pole is a simple zero of the re-poled map; its slope is a Cauchy integral
        # over a small circle (geometric convergence, no cancellation)
        y = np.asarray(y, dtype=complex)
        safe = np.where(at_pole, w.pole + 1.0, y)
        v, d = plain(safe)
        r = 0.25 * abs(y2 - w.pole)
        phase = np.exp(2j * np.pi * np.arange(64) / 64)
        slope = np.mean(plain(w.pole + r * phase)[0] / phase) / r
        return np.where(at_pole, 0, v), np.where(at_pole, slope, d)

    return GluingMap(f"MoebiusOf({w.kind})", y2, w.mode, fn, residue=1 / dw2, inner=w,
                     params={"w_y2": w2, "w_prime_y2": dw2})


def normalized(w: GluingMap, kt: KernelAtT) -> GluingMap:
    """Affine rescaling of a map with a simple pole at y2 to residue d~'(y2).

    That is the normalization under which the first-order ODE for w holds with
    unit constant and the square roots in the decoupled formula are positive.
    """
    if w.residue is None:
        raise ValidationError("normalization needs a map with known residue at y2")
    scale = complex(kt.dt_prime(kt.bp.y2)) / complex(w.residue)

    def fn(y):
        v, d = w.both(y)
        return scale * v, scale * d

    return GluingMap(f"Normalized({w.kind})", w.pole, w.mode, fn, residue=kt.dt_prime(kt.bp.y2), inner=w,
                     params={"scale": scale})


# Weierstrass construction


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = roots_legendre(n)
    return _GL_CACHE[n]


def _gauss_on(f, a, b, n):
    x, wts = _gauss(n)
    mid, half = (a + b) / 2, (b - a) / 2
    return half * np.sum(wts * f(mid + half * x))


def adaptive_quad(f, a, b, tol=1e-12, n0=32, n_max=4096):
    """Gauss-Legendre with node doubling; returns (value, change at the last doubling)."""
    n = n0
    prev = _gauss_on(f, a, b, n)
    while n < n_max:
        n *= 2
        cur = _gauss_on(f, a, b, n)
        err = abs(cur - prev)
        if err <= tol * max(1.0, abs(cur)):
            return cur, err
        prev = cur
    raise QuadratureNotConverged(f"Gauss-Legendre change {err:.2e} above {tol:.1e} at {n} nodes")


class WeierstrassP:
    """``wp(z)`` for the lattice spanned by a real and a purely imaginary period.

    Evaluated as ``(pi/omega)^2 [sum_m csc^2(pi(u + m tau)) - E2(tau)/3]`` with the
    periods ordered so that ``Im tau >= 1``; the sum then converges like ``e^(-2 pi m)``.
    """

    def __init__(self, omega_imag: complex, omega_real: float):
        self.omega_imag = complex(omega_imag)
        self.omega_real = float(omega_real)
        if not (self.omega_real > 0 and self.omega_imag.imag > 0 and abs(self.omega_imag.real) < 1e-14 * abs(self.omega_imag)):
            raise ValidationError("expected one positive real and one positive imaginary period")
        self.omega_imag = 1j * self.omega_imag.imag
        # rotate by -i when the imaginary period is the longer one
        self.rotated = self.omega_imag.imag > self.omega_real
        if self.rotated:
            self.base, self.other = self.omega_imag.imag, 1j * self.omega_real
        else:
            self.base, self.other = self.omega_real, self.omega_imag
        self.tau = self.other / self.base
        self.q = math.exp(-math.pi * self.tau.imag)
        self.M = max(2, int(math.ceil(40 / (2 * math.pi * self.tau.imag))) + 2)
        n = np.arange(1, 60)
        q2n = self.q ** (2 * n)
        self.E2 = 1 - 24 * np.sum(n * q2n / (1 - q2n))
        E4 = 1 + 240 * np.sum(n**3 * q2n / (1 - q2n))
        E6 = 1 - 504 * np.sum(n**5 * q2n / (1 - q2n))
        g2 = (4 * math.pi**4 / 3) * E4 / self.base**4
        g3 = (8 * math.pi**6 / 27) * E6 / self.base**6
        self.g2 = g2
        self.g3 = -g3 if self.rotated else g3
        self.e1 = self(self.omega_real / 2).real
        self.e2 = self((self.omega_real + self.omega_imag) / 2).real
        self.e3 = self(self.omega_imag / 2).real

    def _reduce(self, u):
        k = np.round(u.imag / self.tau.imag)
        u = u - k * self.tau
        return u - np.round(u.real)

    def _sum(self, z, order: int):
        u = self._reduce(np.asarray(z, dtype=complex) / self.base)
        total = 0
        for m in range(-self.M, self.M + 1):
            v = math.pi * (u + m * self.tau)
            s = np.sin(v)
            if order == 0:
                total = total + 1 / (s * s)
            else:
                total = total - 2 * np.cos(v) / (s * s * s)
        if order == 0:
            return (math.pi / self.base) ** 2 * (total - self.E2 / 3)
        return (math.pi / self.base) ** 3 * total

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.rotated:
            return -self._sum(-1j * z, 0)
        return self._sum(z, 0)

    def prime(self, z):
        z = np.asarray(z, dtype=complex)
        if self.rotated:
            return 1j * self._sum(-1j * z, 1)
        return self._sum(z, 1)

    def inverse(self, v, tol=1e-11):
        """A preimage ``z`` with ``wp(z) = v`` (not yet reduced to any fundamental set)."""
        v = np.asarray(v, dtype=complex)
        # on the real axis the Carlson arguments may sit on their cut; seed slightly above it
        nudge = 1e-10 * np.maximum(1.0, np.abs(v))
        seed = np.where(np.abs(v.imag) < nudge, v + 1j * nudge, v)
        z = elliprf(seed - self.e1, seed - self.e2, seed - self.e3)
        for _ in range(6):
            p = self(z) - v
            dp = self.prime(z)
            ok = np.abs(dp) > 0
            z = np.where(ok, z - np.where(ok, p / np.where(ok, dp, 1), 0), z)
        scale = np.maximum(1.0, np.abs(v))
        if np.any(np.abs(self(z) - v) > tol * scale * 1e3):
            raise InversionOutsideFundamentalDomain("inversion of wp did not converge")
        return z


@dataclass
class EllipticData:
    omega1: complex
    omega2: float
    omega3: float
    g2: float
    g3: float
    y4: float
    dt_coeffs: list
    kt: KernelAtT
    p12: WeierstrassP
    p13: WeierstrassP
    errors: dict

    def f(self, y):
        p = np.poly1d(self.dt_coeffs[::-1])
        if self.y4 == INF:
            return p.deriv(2)(0) / 6 + p.deriv(3)(0) * y / 6
        return p.deriv(2)(self.y4) / 6 + p.deriv(1)(self.y4) / (y - self.y4)

    def f_prime(self, y):
        p = np.poly1d(self.dt_coeffs[::-1])
        if self.y4 == INF:
            return p.deriv(3)(0) / 6 + 0 * y
        return -p.deriv(1)(self.y4) / (y - self.y4) ** 2

    def quartic_invariants(self) -> tuple[float, float]:
        """Invariants computed from the coefficients of d~ alone.

        The classical quartic invariants belong to ``x/4`` in the variable used
        by ``f``, hence the factors 16 and 64; they must equal the lattice values.
        """
        c = list(self.dt_coeffs) + [0] * (5 - len(self.dt_coeffs))
        a0, a1, a2, a3, a4 = c[4], c[3] / 4, c[2] / 6, c[1] / 4, c[0]
        g2 = a0 * a4 - 4 * a1 * a3 + 3 * a2 * a2
        g3 = a0 * a2 * a4 + 2 * a1 * a2 * a3 - a2**3 - a0 * a3 * a3 - a1 * a1 * a4
        return 16 * g2, 64 * g3


def _dt_poly(kt: KernelAtT):
    coeffs = [float(c) for c in kt.kd.dt.coefficients(kt.t)]
    while coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def elliptic_periods(kd: KernelData | KernelAtT, t: float | None = None, tol: float = 1e-12) -> EllipticData:
    """Periods of dy/sqrt(d~) and the two Weierstrass functions built on them."""
    kt = kd if isinstance(kd, KernelAtT) else at_t(kd, t if t is not None else kd.t)
    coeffs = _dt_poly(kt)
    lc = coeffs[-1]
    ys = kt.bp.y
    y1, y2, y3, y4 = ys

    def rest(y, skip):
        out = np.full_like(np.asarray(y, dtype=float), abs(lc))
        for k, r in enumerate(ys):
            if k not in skip and r != INF:
                out = out * np.abs(y - r)
        return out

    def between(i, j):
        a, b = ys[i], ys[j]
        m, h = (a + b) / 2, (b - a) / 2
        return lambda phi: 1 / np.sqrt(rest(m + h * np.sin(phi), (i, j)))

    errors = {}
    w1, errors["omega1"] = adaptive_quad(between(0, 1), -np.pi / 2, np.pi / 2, tol)
    w2, errors["omega2"] = adaptive_quad(between(1, 2), -np.pi / 2, np.pi / 2, tol)
    y_x1 = kt.Y_at_x1()
    if y_x1 == INF:
        A = y1 - 1.0
        near = lambda s: 2 / np.sqrt(rest(y1 - s * s, (0,)))  # noqa: E731
        deg = len(coeffs) - 1

        def far(sig):
            P = sum(c * A**k * sig ** (2 * (deg - k)) for k, c in enumerate(coeffs))
            return -2 * A * sig ** (deg - 3) / np.sqrt(P)

        a_part, e1 = adaptive_quad(near, 0.0, 1.0, tol)
        b_part, e2 = adaptive_quad(far, 0.0, 1.0, tol)
        w3, errors["omega3"] = a_part + b_part, e1 + e2
    else:
        L = y1 - float(np.real(y_x1))
        w3, errors["omega3"] = adaptive_quad(lambda s: 2 * math.sqrt(L) / np.sqrt(rest(y1 - L * s * s, (0,))), 0.0, 1.0, tol)
    p12 = WeierstrassP(1j * w1, w2)
    p13 = WeierstrassP(1j * w1, w3)
    return EllipticData(1j * w1, w2, w3, p12.g2, p12.g3, y4, coeffs, kt, p12, p13, errors)


def _into_half_parallelogram(z, ed: EllipticData, eps=1e-12):
    """Pick among ``+-z`` modulo the lattice the representative in
    ``(0, omega1) + (0, omega2/2)`` with its three boundary segments."""
    o1, o2 = ed.omega1.imag, ed.omega2

    def reduce(u):
        re = np.mod(u.real, o2)
        im = np.mod(u.imag, o1)
        re = np.where(re > o2 - eps * o2, re - o2, re)
        im = np.where(im > o1 - eps * o1, im - o1, im)
        return re + 1j * im

    a = reduce(z)
    b = reduce(-z)
    pick = np.where(a.real <= o2 / 2 + eps * o2, a, b)
    # on the segments Re = 0 and Re = omega2/2 only the lower half of the side belongs to the set
    edge = (np.abs(pick.real) <= eps * o2) | (np.abs(pick.real - o2 / 2) <= eps * o2)
    flip = edge & (pick.imag > o1 / 2)
    return np.where(flip, pick.real + 1j * (o1 - pick.imag), pick)


def weierstrass_w(y, ed: EllipticData, derivative: bool = False):
    """``wp13(-(omega1 + omega2)/2 + wp12^{-1}(f(y)))`` (and its y-derivative)."""
    y = np.asarray(y, dtype=complex)
    fy = ed.f(y)
    z = _into_half_parallelogram(ed.p12.inverse(fy), ed)
    zeta = -(ed.omega1 + ed.omega2) / 2 + z
    w = ed.p13(zeta)
    if not derivative:
        return w
    dw = ed.p13.prime(zeta) * ed.f_prime(y) / ed.p12.prime(z)
    return w, dw


def gluing_weierstrass(ed: EllipticData) -> GluingMap:
    """Gluing function with its simple pole at y2."""
    kt = ed.kt
    y2 = kt.bp.y2
    e2 = ed.p12.e2
    residue = (6 * e2 * e2 - ed.g2 / 2) / (2 * complex(ed.f_prime(y2)))
    return GluingMap("WeierstrassComposite", y2, "numeric", lambda y: weierstrass_w(y, ed, True),
                     residue=residue, params={"elliptic": ed})


def w_at_infinity(w: GluingMap) -> complex:
    """Limit of a Weierstrass gluing map at y = infinity (the image of Y(x1) on unbounded contours)."""
    ed = w.params.get("elliptic")
    if ed is None:
        raise BranchPointImageInfinite(f"no value at infinity for {w.kind}")
    if ed.y4 == INF:
        z = 0j
    else:
        p = np.poly1d(ed.dt_coeffs[::-1])
        z = complex(_into_half_parallelogram(ed.p12.inverse(np.array([p.deriv(2)(ed.y4) / 6 + 0j])), ed)[0])
    return complex(ed.p13(np.array([-(ed.omega1 + ed.omega2) / 2 + z]))[0])


def gluing_for(kt: KernelAtT, prefer: str = "auto") -> GluingMap:
    """A gluing map with its pole at y2: re-poled explicit formula if one exists, else Weierstrass."""
    if prefer in ("auto", "explicit") and has_explicit(kt.kd.steps):
        return repole(gluing_explicit(kt.kd.steps, kt.t), kt.bp.y2)
    if prefer == "explicit":
        raise ValidationError(f"no explicit gluing function for {kt.kd.steps.label()}")
    return gluing_weierstrass(elliptic_periods(kt))


# anti-Tutte pair


def _sqrt_outside_cut(z):
    """``sqrt(z^2 - 1)`` with cut [-1, 1], positive for z > 1."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return z * np.sqrt(1 - 1 / (z * z))


@dataclass
class AntiTutte:
    """``g = h(hat w)`` maps the domain onto the unit disc; ``f = g/g'`` decouples the BVP."""

    w: GluingMap
    kt: KernelAtT
    w_a: complex
    w_b: complex
    side: int

    def hat_w(self, y):
        return (2 * self.w(y) - self.w_a - self.w_b) / (self.w_a - self.w_b)

    def _root(self, hw, y, on_contour):
        if not on_contour:
            return _sqrt_outside_cut(hw)
        # limit from inside the domain: hat w approaches [-1,1] from the side fixed by `side`
        sgn = np.where(np.imag(y) >= 0, self.side, -self.side)
        return 1j * sgn * np.sqrt(1 - np.real(hw) ** 2 + 0j)

    def g(self, y, on_contour: bool = False):
        hw = self.hat_w(y)
        return -hw + self._root(hw, y, on_contour)

    def f(self, y, on_contour: bool = False):
        """Closed form ``-sqrt((w - w(Y(x1)))(w - w(Y(x2))))/w'``."""
        v, d = self.w.both(y)
        hw = (2 * v - self.w_a - self.w_b) / (self.w_a - self.w_b)
        return -((self.w_a - self.w_b) / 2) * self._root(hw, y, on_contour) / d

    def f_ratio(self, y, h: float = 1e-6):
        """``g/g'`` with g' by central differences (interior points only)."""
        y = np.asarray(y, dtype=complex)
        scale = np.maximum(1.0, np.abs(y))
        dg = (self.g(y + h * scale) - self.g(y - h * scale)) / (2 * h * scale)
        return self.g(y) / dg


def anti_tutte_pair(w: GluingMap, kd: KernelData | KernelAtT, t: float | None = None) -> AntiTutte:
    kt = kd if isinstance(kd, KernelAtT) else at_t(kd, t if t is not None else kd.t)
    y_x1 = kt.Y_at_x1()
    if y_x1 == INF:
        raise BranchPointImageInfinite("Y(x1) is infinite: the contour is unbounded")
    w_a = complex(w(complex(y_x1)))
    w_b = complex(w(complex(kt.Y_at_x2())))
    pair = AntiTutte(w, kt, w_a, w_b, 1)
    # orientation of the boundary limit: probe just inside L0 near its top
    from .geometry import CurveParametrization

    z, _ = CurveParametrization(kt)(np.array([np.pi / 2]))
    inner = 0.5 * (kt.bp.y1 + kt.bp.y2)
    probe = z[0] + 1e-3 * (inner - z[0])
    pair.side = 1 if float(np.imag(pair.hat_w(probe))) >= 0 else -1
    return pair


def gessel_anti_tutte(t: float):
    """The rational pair for Gessel's kernel: ``g = y/(t(y+1)^2)`` and ``f = y(y+1)/(y-1)``."""
    g = lambda y: y / (t * (y + 1) ** 2)  # noqa: E731
    f = lambda y: y * (y + 1) / (y - 1)  # noqa: E731
    return g, f


# ODE satisfied by the gluing function


def check_w_ode(w: GluingMap, kd: KernelData | KernelAtT, t: float | None = None, samples=None) -> float:
    """Max relative residual of ``d~ w'^2 = (d~'(y2)/r)(w - w(Y(x1)))(w - w(Y(x2)))(w - w(y1))``.

    ``r`` is the residue of w at y2; for a map with residue d~'(y2) the constant is 1.
    """
    kt = kd if isinstance(kd, KernelAtT) else at_t(kd, t if t is not None else kd.t)
    if w.residue is None:
        raise ValidationError("the ODE needs a map with a simple pole at y2")
    y_x1 = kt.Y_at_x1()
    if samples is None:
        samples = default_ode_samples(kt)
    samples = np.asarray(samples, dtype=complex)
    wa = w_at_infinity(w) if y_x1 == INF else complex(w(complex(y_x1)))
    wb = complex(w(complex(kt.Y_at_x2())))
    w1 = complex(w(complex(kt.bp.y1)))
    const = complex(kt.dt_prime(kt.bp.y2)) / complex(w.residue)
    v, d = w.both(samples)
    lhs = kt.dt(samples) * d * d
    rhs = const * (v - wa) * (v - wb) * (v - w1)
    return float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(lhs), np.abs(rhs))))


def default_ode_samples(kt: KernelAtT, n: int = 20) -> np.ndarray:
    """Points of ``[y2, Y(x2)]`` (inside the domain, off both ends) with small imaginary offsets."""
    y2, yx2 = kt.bp.y2, float(np.real(kt.Y_at_x2()))
    s = np.linspace(0.1, 0.9, n)
    base = y2 + s * (yx2 - y2)
    return base + 1j * 0.05 * (yx2 - y2) * np.sin(3 * s)


# property residuals (shared by the CLI report and the tests)

GESSEL_STEPS = frozenset({(1, 1), (-1, 0), (1, 0), (-1, -1)})


def real_segment_samples(kt: KernelAtT, n: int = 20) -> np.ndarray:
    """Points strictly inside ``(y2, Y(x2))``, where every square root involved is real."""
    y2, yx2 = kt.bp.y2, float(np.real(kt.Y_at_x2()))
    return (y2 + np.linspace(0.05, 0.95, n) * (yx2 - y2)).astype(complex)


def gluing_residual(w: GluingMap, points) -> float:
    points = np.asarray(points, dtype=complex)
    v = w(points)
    return float(np.max(np.abs(v - w(np.conj(points))) / np.maximum(1.0, np.abs(v))))


def injectivity_margin(w: GluingMap, contour, n: int = 12) -> float:
    """Smallest ``|w(u) - w(v)| / |u - v|`` over pairs of a grid of interior points (positive if injective)."""
    from .geometry import in_domain

    pts = contour.points[np.isfinite(contour.points)]
    lo, hi = pts.real.min(), pts.real.max()
    top = min(float(np.abs(pts.imag).max()), 4 * (hi - lo))
    if contour.unbounded:
        lo = contour.crossings[0] - 2 * (hi - lo)
    grid = [complex(a, b) for a in np.linspace(lo, hi, n + 2)[1:-1] for b in np.linspace(-top, top, n + 2)[1:-1]]
    inside = []
    for y in grid:
        try:
            if in_domain(contour, y) and abs(y - w.pole) > 1e-3 * max(1.0, abs(w.pole)):
                inside.append(y)
        except Exception:
            continue
    y = np.array(inside)
    if len(y) < 2:
        return math.inf
    v = w(y)
    i, j = np.triu_indices(len(y), 1)
    return float(np.min(np.abs(v[i] - v[j]) / np.abs(y[i] - y[j])))


def sqrt_ratio_residual(kt: KernelAtT, n: int = 40, h: float = 1e-6) -> float:
    """``sqrt(d~(Y0))/sqrt(d~(Y1)) + Y0'/Y1'`` on the cut, derivatives by central differences."""
    x1, x2 = kt.bp.x1, kt.bp.x2
    x = x1 + (x2 - x1) * np.linspace(0.05, 0.95, n)
    step = h * (x2 - x1)
    x = x.astype(complex)
    # Y0 carries the positive imaginary part; follow it by continuity across the difference stencil
    y0 = kt.Y_analytic(x, -1)
    y1 = np.conj(y0)
    d0 = (kt.Y_analytic(x + step, -1) - kt.Y_analytic(x - step, -1)) / (2 * step)
    d1 = np.conj(d0)
    lhs = kt.sqrt_dt(y0) / kt.sqrt_dt(y1)
    return float(np.max(np.abs(lhs + d0 / d1)))


def property_report(kt: KernelAtT, prefer: str = "auto", n_points: int = 400, samples: int = 50) -> dict:
    """Residual of every checkable property of the gluing function and the anti-Tutte pair."""
    from .geometry import trace_curve

    contour = trace_curve(kt, n_points=n_points)
    w = gluing_for(kt, prefer)
    pts = contour.points[contour.upper]
    pts = pts[np.isfinite(pts)]
    pts = pts[:: max(1, len(pts) // samples)][:samples]
    report: dict = {"kind": w.kind, "bounded": not contour.unbounded, "gluing": gluing_residual(w, pts)}
    report["injectivity_margin"] = injectivity_margin(w, contour)
    report["sqrt_ratio"] = sqrt_ratio_residual(kt)
    if frozenset(kt.kd.steps.steps) == GESSEL_STEPS:
        g, f = gessel_anti_tutte(kt.t)
        on = contour.points
        report["gessel_g_product"] = float(np.max(np.abs(g(on) * g(np.conj(on)) - 1)))
        report["gessel_decoupling"] = float(np.max(np.abs(
            kt.sqrt_dt(np.conj(on)) / kt.sqrt_dt(on) - f(np.conj(on)) / f(on))))
    if contour.unbounded:
        if "elliptic" in w.params:
            report["ode"] = check_w_ode(w, kt)
        return report
    report["ode"] = check_w_ode(w, kt)
    wn = normalized(w, kt)
    pair = anti_tutte_pair(wn, kt)
    report["anti_tutte_modulus"] = float(np.max(np.abs(np.abs(pair.g(pts, on_contour=True)) - 1)))
    report["decoupling"] = float(np.max(np.abs(
        kt.sqrt_dt(np.conj(pts)) / kt.sqrt_dt(pts)
        - pair.f(np.conj(pts), on_contour=True) / pair.f(pts, on_contour=True))))
    seg = real_segment_samples(kt)
    w1 = wn(complex(kt.bp.y1))
    report["f_over_sqrt"] = float(np.max(np.abs(pair.f(seg) / kt.sqrt_dt(seg) - 1 / np.sqrt(wn(seg) - w1))))
    report["f_closed_vs_ratio"] = float(np.max(np.abs(pair.f_ratio(seg) / pair.f(seg) - 1)))
    report["sign_min"] = float(np.min(np.real(-kt.sqrt_dt(seg) * wn.derivative(seg))))
    return report
