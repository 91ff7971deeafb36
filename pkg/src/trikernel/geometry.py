"""The curve L traced from the kernel, membership in its interior domain, and winding numbers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OnCurve, PhaseJumpTooLarge
from .kernel import INF, KernelAtT, KernelData, at_t

DEFAULT_POINTS = 2048


class CurveParametrization:
    """Smooth periodic parametrization ``theta -> z(theta)`` of L.

    With ``s = x1 + (x2 - x1)(1 + cos theta)/2`` the two branches over the cut
    join into one analytic loop: ``theta = 0`` gives Y(x2), ``theta = pi``
    gives Y(x1), and ``(0, pi)`` runs through the upper half L0.  The loop is
    counterclockwise when L is bounded.
    """

    def __init__(self, kt: KernelAtT):
        self.kt = kt
        x1, x2, x3, x4 = kt.bp.x
        self.x1, self.x2 = x1, x2
        self.k = (x2 - x1) / 2
        coeffs = [float(c) for c in kt.kd.d.coefficients(kt.t)]
        while coeffs[-1] == 0:
            coeffs.pop()
        self.lc = coeffs[-1]
        self.far = [r for r in (x3, x4) if r != INF]
        da = kt.kd.a.derivative()
        db = kt.kd.b.derivative()
        dc = kt.kd.c.derivative()
        self._da = lambda s: da(s, kt.t)
        self._db = lambda s: db(s, kt.t)
        self._dc = lambda s: dc(s, kt.t)

    @property
    def unbounded(self) -> bool:
        return self.x1 == 0 and abs(self.kt.a(0.0)) == 0

    def _R(self, s):
        prod = np.full_like(s, abs(self.lc), dtype=float)
        for r in self.far:
            prod = prod * np.abs(s - r)
        return np.sqrt(prod)

    def x_of(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.x1 + self.k * (1 + np.cos(theta))

    def __call__(self, theta):
        """Points ``z(theta)`` and derivatives ``dz/dtheta``."""
        theta = np.asarray(theta, dtype=float)
        s = self.x_of(theta)
        ds = -self.k * np.sin(theta)
        a, b = self.kt.a(s), self.kt.b(s)
        sa = np.sign(a)
        R = self._R(s)
        dR = R / 2 * sum(1.0 / (s - r) for r in self.far) if self.far else np.zeros_like(s)
        N = -b + 1j * sa * R * self.k * np.sin(theta)
        dN = -self._db(s) * ds + 1j * sa * self.k * (dR * ds * np.sin(theta) + R * np.cos(theta))
        with np.errstate(divide="ignore", invalid="ignore"):
            z = N / (2 * a)
            dz = (dN * a - N * self._da(s) * ds) / (2 * a * a)
        return z, dz


def trapezoid_nodes(n: int) -> np.ndarray:
    """Midpoint nodes of the periodic trapezoid rule (never hits the real crossings)."""
    return (np.arange(n) + 0.5) * (2 * np.pi / n)


@dataclass(frozen=True)
class Contour:
    """Samples of L in counterclockwise order (for bounded L)."""

    points: np.ndarray
    dz: np.ndarray
    theta: np.ndarray
    x_param: np.ndarray
    closed: bool
    unbounded: bool
    orientation: int
    upper: slice
    lower: slice
    crossings: tuple
    t: float

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n, 2 * np.pi / self.n)

    def mesh(self) -> float:
        return float(np.max(np.abs(np.diff(np.append(self.points, self.points[0])))))

    def integrate(self, values) -> complex:
        """``oint F(z) dz`` by the periodic trapezoid rule in theta."""
        return complex(np.sum(np.asarray(values) * self.dz) * (2 * np.pi / self.n))

    def to_rows(self):
        for x, p in zip(self.x_param, self.points):
            yield float(x), float(p.real), float(p.imag)


def trace_curve(kd: KernelData | KernelAtT, t: float | None = None, n_points: int = DEFAULT_POINTS) -> Contour:
    """Sample L = Y0([x1,x2]) u Y1([x1,x2]) over a Chebyshev grid of the cut."""
    kt = kd if isinstance(kd, KernelAtT) else at_t(kd, t if t is not None else kd.t)
    param = CurveParametrization(kt)
    theta = trapezoid_nodes(n_points)
    z, dz = param(theta)
    half = n_points // 2
    unbounded = param.unbounded
    y_x2 = kt.Y_at_x2()
    y_x1 = INF if unbounded else kt.Y_at_x1()
    return Contour(
        points=z, dz=dz, theta=theta, x_param=param.x_of(theta), closed=not unbounded,
        unbounded=unbounded, orientation=1, upper=slice(0, half), lower=slice(half, n_points),
        crossings=(float(np.real(y_x2)), y_x1 if y_x1 == INF else float(np.real(y_x1))), t=kt.t,
    )


def _segment_distance(points: np.ndarray, y: complex) -> float:
    a = points
    b = np.roll(points, -1)
    ab = b - a
    denom = np.abs(ab) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.clip(((y - a) * np.conj(ab)).real / denom, 0, 1)
    u = np.where(denom > 0, u, 0)
    return float(np.min(np.abs(a + u * ab - y)))


def _closed_polygon(contour: Contour) -> np.ndarray:
    if not contour.unbounded:
        return contour.points
    # the open ends sit at theta = pi, mid-array; close around the left so real +inf stays outside
    up, low = contour.points[contour.upper], contour.points[contour.lower]
    far = 4 * float(np.max(np.abs(contour.points)))
    bridge = [up[-1].real + 1j * far, -far + 1j * far, -far - 1j * far, low[0].real - 1j * far]
    return np.concatenate([up, bridge, low])


def in_domain(contour: Contour, y: complex, tol: float | None = None) -> bool:
    """Is ``y`` in the component bounded by L that avoids real +infinity?"""
    pts = _closed_polygon(contour)
    scale = max(1.0, float(np.max(np.abs(pts))))
    tol = 1e-9 * scale if tol is None else tol
    if _segment_distance(pts, y) < tol:
        raise OnCurve(f"{y} lies on the contour")
    rel = pts - y
    steps = np.angle(np.roll(rel, -1) / rel)
    wind = int(round(float(np.sum(steps)) / (2 * np.pi)))
    return wind != 0


def winding_index(values, closed: bool = True, max_step: float = np.pi / 2) -> int:
    """Total argument increase of ``values`` divided by 2 pi, checked to be an integer."""
    v = np.asarray(values, dtype=complex)
    if np.any(v == 0):
        raise PhaseJumpTooLarge("values vanish on the contour")
    if closed:
        v = np.append(v, v[0])
    steps = np.angle(v[1:] / v[:-1])
    if steps.size and np.max(np.abs(steps)) > max_step:
        raise PhaseJumpTooLarge(f"phase step {np.max(np.abs(steps)):.3f} exceeds {max_step:.3f}")
    total = float(np.sum(steps)) / (2 * np.pi)
    k = round(total)
    if abs(total - k) > 0.1:
        raise PhaseJumpTooLarge(f"accumulated winding {total:.4f} is not an integer")
    return int(k)


def discriminant_winding(contour: Contour, kt: KernelAtT) -> int:
    """Winding of d~ along L; two for bounded contours."""
    return winding_index(kt.dt(contour.points))


def bvp_index(contour: Contour, kt: KernelAtT) -> int:
    """Index of ``sqrt(d~(v-))/sqrt(d~(v+))`` along U, read along L0 from Y(x2) to Y(x1).

    The ratio is ``conj(q)/q`` with ``q = sqrt(d~)``; its argument is ``-arg d~``,
    so the increment is tracked on d~ itself along the upper half.
    """
    upper = contour.points[contour.upper]
    ends = np.array([contour.crossings[0]], dtype=complex)
    path = np.concatenate([ends, upper])
    if not contour.unbounded:
        path = np.append(path, contour.crossings[1])
    vals = kt.dt(path)
    steps = np.angle(vals[1:] / vals[:-1])
    if np.max(np.abs(steps)) > np.pi / 2:
        raise PhaseJumpTooLarge("mesh too coarse for the index")
    total = -float(np.sum(steps)) / (2 * np.pi)
    k = round(total)
    if abs(total - k) > 0.1:
        raise PhaseJumpTooLarge(f"accumulated index {total:.4f} is not an integer")
    return int(k)
