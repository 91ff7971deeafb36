"""The boundary value problem for the diagonal section D(y): oracle, both solution formulas, series and sections."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .conformal import GluingMap, W_series, anti_tutte_pair, gluing_explicit, gluing_for, normalized
from .enumerate import count_walks, extract_section
from .errors import (
    BranchDiscontinuity,
    BranchPointImageInfinite,
    ConvergenceDomainViolated,
    IndexMismatch,
    KernelZero,
    PointTooCloseToContour,
    TruncationInsufficient,
    TruncationTailTooLarge,
    ValidationError,
)
from .geometry import DEFAULT_POINTS, Contour, CurveParametrization, bvp_index, trace_curve
from .kernel import INF, KernelAtT, KernelData, Y_branches, at_t, branch_points_series, branch_value_series, build_kernel
from .model import StepSet, load_model, phi_inverse_steps, phi_transform, preset
from .pseries import PuiseuxSeries, T, ZPoly, power, residue_on_unit_circle, series, sqrt_series

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class Problem:
    """A symmetric model, its phi-image kernel and the kernel at a fixed t."""

    steps_hat: StepSet
    kd: KernelData
    kt: KernelAtT

    @property
    def t(self) -> float:
        return self.kt.t

    @property
    def delta(self) -> int:
        return self.steps_hat.delta(-1, -1)


def setup(model: StepSet | str, t: float) -> Problem:
    steps_hat = load_model(model) if isinstance(model, str) else model
    kd = build_kernel(phi_transform(steps_hat))
    return Problem(steps_hat, kd, at_t(kd, t))


def _kernel_at(kd: KernelData | KernelAtT, t) -> KernelAtT:
    if isinstance(kd, KernelAtT):
        return kd
    return at_t(kd, t if t is not None else kd.t)


# enumeration oracle for D


def diagonal_rho(steps_hat: StepSet) -> Fraction:
    """Largest ``u`` with ``(u, u)`` in the convex hull of the steps.

    After ``n`` steps the diagonal index is at most ``rho * n``.
    """
    best = Fraction(0)
    pts = list(steps_hat)
    for p in pts:
        for q in pts:
            dp, dq = p[0] - p[1], q[0] - q[1]
            if dp == dq:
                if dp == 0:
                    best = max(best, Fraction(max(p[0], q[0])))
                continue
            s = Fraction(dp, dp - dq)
            if 0 <= s <= 1:
                best = max(best, p[0] + s * (q[0] - p[0]))
    return best


@dataclass(frozen=True)
class DiagonalOracle:
    """``D(y) = sum_n sum_a c_n(a, a) y^a t^n`` truncated at ``n <= N``, from exact counts."""

    steps: StepSet
    N: int
    coeffs: tuple
    rho: Fraction

    @classmethod
    def build(cls, steps_hat: StepSet, N: int) -> "DiagonalOracle":
        table = count_walks(steps_hat, "three_quadrant", (0, 0), N)
        coeffs = tuple(tuple(table.count(n, a, a) for a in range(n + 1)) for n in range(N + 1))
        return cls(steps_hat, N, coeffs, diagonal_rho(steps_hat))

    def __call__(self, y, t: float):
        y = np.asarray(y, dtype=complex)
        out = np.zeros_like(y)
        for row in reversed(self.coeffs):
            out = out * t + np.polynomial.polynomial.polyval(y, [float(c) for c in row])
        return out

    def ratio(self, y_abs: float, t: float) -> float:
        return len(self.steps) * t * max(1.0, y_abs) ** float(self.rho)

    def tail_bound(self, y_abs: float, t: float) -> float:
        """Bound on the omitted terms ``n > N`` at ``|y| <= y_abs``."""
        q = self.ratio(y_abs, t)
        if q >= 1:
            return math.inf
        return q ** (self.N + 1) / (1 - q)

    def series_at_zero(self) -> PuiseuxSeries:
        return PuiseuxSeries({n: row[0] for n, row in enumerate(self.coeffs)}, 1, self.N + 1)


def _contour_samples(contour: Contour, samples: int) -> np.ndarray:
    pts = contour.points[contour.upper]
    pts = pts[np.isfinite(pts)]
    idx = np.linspace(0, len(pts) - 1, samples + 2)[1:-1].round().astype(int)
    return pts[idx]


def boundary_residual(kd: KernelData | KernelAtT, contour: Contour, t: float, D_oracle: DiagonalOracle,
                      samples: int = 40, tol: float = 1e-9) -> float:
    """Max of ``|sqrt(d~(y)) D(y) - sqrt(d~(ybar)) D(ybar) - (y - ybar)|`` over samples of L0."""
    kt = _kernel_at(kd, t)
    y = _contour_samples(contour, samples)
    q_y, q_c = kt.sqrt_dt(y), kt.sqrt_dt(np.conj(y))
    tail = D_oracle.tail_bound(float(np.max(np.abs(y))), t) * float(np.max(np.abs(q_y) + np.abs(q_c)))
    if tail > tol:
        raise TruncationTailTooLarge(f"truncation tail {tail:.2e} exceeds {tol:.1e}")
    lhs = q_y * D_oracle(y, t) - q_c * D_oracle(np.conj(y), t)
    return float(np.max(np.abs(lhs - (y - np.conj(y)))))


def zero_index_residual(kd: KernelData | KernelAtT, contour: Contour, t: float, D_oracle: DiagonalOracle,
                        samples: int = 40, w: GluingMap | None = None) -> float:
    """``f(y) D(y) - f(ybar) D(ybar) - f(y)(y - ybar)/sqrt(d~(y))`` with boundary limits of f."""
    kt = _kernel_at(kd, t)
    pair = anti_tutte_pair(normalized(w or gluing_for(kt), kt), kt)
    y = _contour_samples(contour, samples)
    f, fc = pair.f(y, on_contour=True), pair.f(np.conj(y), on_contour=True)
    lhs = f * D_oracle(y, t) - fc * D_oracle(np.conj(y), t)
    return float(np.max(np.abs(lhs - f * (y - np.conj(y)) / kt.sqrt_dt(y))))


# Cauchy integrals on closed contours


def circle_contour(n: int, radius: float = 1.0) -> Contour:
    """Counterclockwise circle sampled at ``theta_k = 2 pi k / n`` (the first node is the real point)."""
    theta = 2 * np.pi * np.arange(n) / n
    z = radius * np.exp(1j * theta)
    half = n // 2
    return Contour(points=z, dz=1j * z, theta=theta, x_param=theta, closed=True, unbounded=False,
                   orientation=1, upper=slice(0, half), lower=slice(half, n),
                   crossings=(radius, -radius), t=math.nan)


def _require_closed(contour: Contour) -> None:
    if not contour.closed:
        raise ValidationError("Cauchy integrals need a closed contour")


def cauchy_integral(values, contour: Contour, z):
    """``(1/2 pi i) oint f(u)/(u - z) du`` for ``z`` off the contour."""
    _require_closed(contour)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    dist = np.min(np.abs(contour.points[None, :] - z[:, None]), axis=1)
    if np.any(dist < contour.mesh()):
        raise PointTooCloseToContour(f"evaluation point within {float(np.min(dist)):.2e} of the contour")
    weights = np.asarray(values) * contour.dz * (2 * np.pi / contour.n) / TWO_PI_I
    return np.sum(weights[None, :] / (contour.points[None, :] - z[:, None]), axis=1)


def _spectral_derivative(values) -> np.ndarray:
    n = len(values)
    k = np.fft.fftfreq(n, 1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0
    return np.fft.ifft(1j * k * np.fft.fft(values))


def plemelj_limits(values, contour: Contour) -> tuple[np.ndarray, np.ndarray]:
    """Interior and exterior limits ``F+ = f/2 + PV``, ``F- = -f/2 + PV`` at every node.

    The principal value subtracts ``f(z)``: the smooth remainder is integrated
    by the trapezoid rule (its diagonal term is ``df/dtheta``), and the
    subtracted part contributes ``i pi f(z)``.
    """
    _require_closed(contour)
    f = np.asarray(values, dtype=complex)
    z, dz = contour.points, contour.dz
    h = 2 * np.pi / contour.n
    diff = z[None, :] - z[:, None]
    np.fill_diagonal(diff, 1.0)
    terms = (f[None, :] - f[:, None]) * dz[None, :] / diff
    np.fill_diagonal(terms, 0.0)
    pv = h * (np.sum(terms, axis=1) + _spectral_derivative(f)) + 1j * np.pi * f
    pv = pv / TWO_PI_I
    return f / 2 + pv, -f / 2 + pv


def sokhotski_plemelj(values, contour: Contour, z_off=None):
    """Cauchy integral at ``z_off``, or the pair of boundary limits when ``z_off`` is None."""
    if z_off is None:
        return plemelj_limits(values, contour)
    return cauchy_integral(values, contour, z_off)


@dataclass(frozen=True)
class CauchyIntegralResult:
    value: complex
    error: float
    contour: str
    n_points: int

    def to_json(self) -> dict:
        return {"re": float(self.value.real), "im": float(self.value.imag), "error": self.error,
                "contour": self.contour, "n_points": self.n_points}


# zero-index formula


def tracked_sqrt(values, anchor: int = 0, closed: bool = True) -> np.ndarray:
    """Square root continuous along the samples, positive at ``values[anchor]``."""
    v = np.asarray(values, dtype=complex)
    if v[anchor].real <= 0 or abs(v[anchor].imag) > 1e-6 * abs(v[anchor]):
        raise BranchDiscontinuity("the anchor value is not positive")
    order = np.roll(np.arange(len(v)), -anchor)
    seq = v[order]
    steps = np.angle(seq[1:] / seq[:-1])
    if steps.size and np.max(np.abs(steps)) > np.pi / 2:
        raise BranchDiscontinuity(f"phase jump {np.max(np.abs(steps)):.3f} between samples")
    phase = np.concatenate([[0.0], np.cumsum(steps)])
    if closed:
        total = phase[-1] + np.angle(seq[0] / seq[-1])
        if abs(total) > np.pi:
            raise BranchDiscontinuity("the square root does not close up along the contour")
    out = np.empty_like(v)
    out[order] = np.sqrt(np.abs(seq)) * np.exp(0.5j * phase)
    return out


class Theorem2Solver:
    """``D(y) = (1/f(y)) (1/2 pi i) oint z w'(z) / (sqrt(w(z) - w(y1)) (w(z) - w(y))) dz``.

    ``w`` is normalized to residue d~'(y2) at its pole y2, so no further
    constant appears; ``f`` is the decoupling function of the anti-Tutte pair.
    """

    def __init__(self, kt: KernelAtT, w: GluingMap | None = None, n_points: int = DEFAULT_POINTS,
                 route: str = "contour", radius: float = 1.0):
        w = gluing_for(kt) if w is None else w
        if w.residue is None or w.pole is None or abs(complex(w.pole) - kt.bp.y2) > 1e-12 * max(1.0, kt.bp.y2):
            raise ValidationError("the zero-index formula needs a gluing map with its pole at y2")
        self.kt = kt
        self.w = normalized(w, kt)
        self.pair = anti_tutte_pair(self.w, kt)
        self.w_y1 = complex(self.w(complex(kt.bp.y1)))
        if route == "contour":
            contour = trace_curve(kt, n_points=n_points)
        elif route == "circle":
            contour = circle_contour(n_points, radius)
        else:
            raise ValidationError(f"unknown route {route!r}")
        self.route = route
        self.contour = contour
        z = contour.points
        v, dv = self.w.both(z)
        root = tracked_sqrt(v - self.w_y1, anchor=int(np.argmin(np.abs(contour.theta))))
        self._wz = v
        self._weights = z * dv / root * contour.dz * (2 * np.pi / contour.n) / TWO_PI_I

    def integral(self, y) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=complex))
        dist = np.min(np.abs(self.contour.points[None, :] - y[:, None]), axis=1)
        if np.any(dist < self.contour.mesh()):
            raise PointTooCloseToContour("evaluation point within one mesh cell of the contour")
        wy = self.w(y)
        return np.sum(self._weights[None, :] / (self._wz[None, :] - wy[:, None]), axis=1)

    def prefactor(self, y) -> np.ndarray:
        return 1 / self.pair.f(np.atleast_1d(np.asarray(y, dtype=complex)))

    def __call__(self, y) -> np.ndarray:
        return self.prefactor(y) * self.integral(y)


# index -1 formula


class Theorem1Solver:
    """``D(y) = Psi(w(y)) (1/2 pi i) int_{L0} g(z) w'(z) / (Psi+(w(z)) (w(z) - w(y))) dz``.

    ``Psi(u) = (u - w(Y(x1))) exp Gamma(u)`` and ``Gamma`` is the Cauchy
    integral of ``log(sqrt(d~(zbar))/sqrt(d~(z)))`` over the image segment
    ``U = w(L0)``.  Everything is parametrized by ``theta in [0, pi]`` and
    integrated by Gauss-Legendre; the logarithm is continuous in closed form
    as ``-i (sum_k Arg(z - y_k) - same at Y(x2))``.
    """

    def __init__(self, kt: KernelAtT, w: GluingMap | None = None, n_nodes: int = 400):
        contour = trace_curve(kt, n_points=DEFAULT_POINTS)
        if contour.unbounded:
            raise BranchPointImageInfinite("the index -1 formula needs a bounded contour")
        index = bvp_index(contour, kt)
        if index != -1:
            raise IndexMismatch(f"index {index}, expected -1")
        self.kt = kt
        self.n_nodes = n_nodes
        w = normalized(gluing_for(kt) if w is None else w, kt)
        self.w = w
        x, wts = roots_legendre(n_nodes)
        theta = (x + 1) * np.pi / 2
        wts = wts * np.pi / 2
        param = CurveParametrization(kt)
        z, dz = param(theta)
        s, ds = w.both(z)
        sp = ds * dz
        a = complex(w(complex(kt.Y_at_x2()))).real
        b = complex(w(complex(kt.Y_at_x1()))).real
        roots = [r for r in kt.bp.y if r != INF and r is not None]
        y_x2 = float(np.real(kt.Y_at_x2()))
        base = sum(np.angle(complex(y_x2 - r, 0.0)) for r in roots)
        lam = -1j * (sum(np.angle(z - r) for r in roots) - base)
        lam_p = -1j * np.imag(sum(dz / (z - r) for r in roots))
        # orientation: +1 when the side of U seen from the domain near L0 is to the left of a -> b
        mid, _ = param(np.array([np.pi / 2]))
        probe = mid[0] + 1e-3 * (0.5 * (kt.bp.y1 + kt.bp.y2) - mid[0])
        self.sigma = 1 if float(np.imag((complex(w(probe)) - a) / (b - a))) > 0 else -1
        s_real = np.real(s)
        diff = s_real[None, :] - s_real[:, None]
        np.fill_diagonal(diff, 1.0)
        terms = (lam[None, :] - lam[:, None]) * (sp * wts)[None, :] / diff
        np.fill_diagonal(terms, 0.0)
        pv = np.sum(terms, axis=1) + wts * lam_p + lam * (np.log(np.abs(b - s_real)) - np.log(np.abs(a - s_real)))
        gamma_plus = lam / 2 + self.sigma * pv / TWO_PI_I
        psi_plus = (s_real - b) * np.exp(gamma_plus)
        g = (z - np.conj(z)) / kt.sqrt_dt(z)
        self.a, self.b = a, b
        self._s = s_real
        self._lam_w = lam * sp * wts
        self._outer_w = g * sp * wts / psi_plus
        self.lam_end = complex(lam[-1])

    def gamma(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=complex))
        return self.sigma * np.sum(self._lam_w[None, :] / (self._s[None, :] - u[:, None]), axis=1) / TWO_PI_I

    def psi(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=complex))
        return (u - self.b) * np.exp(self.gamma(u))

    def __call__(self, y) -> np.ndarray:
        u = self.w(np.atleast_1d(np.asarray(y, dtype=complex)))
        outer = self.sigma * np.sum(self._outer_w[None, :] / (self._s[None, :] - u[:, None]), axis=1) / TWO_PI_I
        return self.psi(u) * outer


# evaluator with a two-level error estimate


@dataclass
class DiagonalEvaluator:
    method: str
    kt: KernelAtT
    solver: object
    coarse: object
    route: str
    n_points: int

    def __call__(self, y):
        return self.solver(y)

    def evaluate(self, y: complex) -> CauchyIntegralResult:
        fine = complex(self.solver(y)[0])
        err = abs(fine - complex(self.coarse(y)[0]))
        return CauchyIntegralResult(fine, float(err), self.route, self.n_points)


def make_evaluator(kd: KernelData | KernelAtT, t: float | None = None, method: str = "thm2",
                   n_points: int | None = None, route: str = "contour", w: GluingMap | None = None,
                   radius: float = 1.0) -> DiagonalEvaluator:
    kt = _kernel_at(kd, t)
    if method == "thm2":
        n = n_points or DEFAULT_POINTS
        make = lambda m: Theorem2Solver(kt, w, m, route, radius)  # noqa: E731
    elif method == "thm1":
        n = n_points or 400
        route = "L0"
        make = lambda m: Theorem1Solver(kt, w, m)  # noqa: E731
    else:
        raise ValidationError(f"unknown method {method!r}")
    return DiagonalEvaluator(method, kt, make(n), make(n // 2), route, n)


def theorem1_D(y, evaluator: DiagonalEvaluator):
    if evaluator.method != "thm1":
        raise ValidationError("evaluator is not a thm1 evaluator")
    return evaluator(y)


def theorem2_D(y, evaluator: DiagonalEvaluator):
    if evaluator.method != "thm2":
        raise ValidationError("evaluator is not a thm2 evaluator")
    return evaluator(y)


# exact series for D(0): reverse Kreweras


def series_intermediates(order: int = 24) -> dict:
    """Every intermediate series of the exact pipeline for D(0), reverse Kreweras.

    The phi-image kernel is Kreweras'.  ``w`` is the explicit map with pole
    at 0 and ``w_y2 = 1/(w - w(y2))`` its re-poled version.
    """
    kd = build_kernel(phi_transform(preset("reverse-kreweras")))
    bp = branch_points_series(kd, order)
    w = gluing_explicit(kd, None, order)
    y1, y2 = bp.y1, bp.y2
    x1, x2 = bp.x1, bp.x2
    w_y2, dw_y2 = w.both(y2)
    dt_prime = kd.dt.derivative()(y2, T)
    y_x1 = branch_value_series(kd, x1)
    y_x2 = branch_value_series(kd, x2)
    repoled = lambda v: 1 / (w(v) - w_y2)  # noqa: E731
    out = {
        "W": w.params["W"], "x1": x1, "x2": x2, "y1": y1, "y2": y2,
        "dt_prime_y2": dt_prime, "sqrt_dt_prime_y2": sqrt_series(dt_prime, order),
        "w_y2": w_y2, "w_prime_y2": dw_y2, "sqrt_neg_w_prime_y2": sqrt_series(-dw_y2, order),
        "Y_x1": y_x1, "Y_x2": y_x2,
        "wy2_y1": repoled(y1), "wy2_Y_x1": repoled(y_x1), "wy2_Y_x2": repoled(y_x2),
        "w_y1": w(y1),
    }
    num = sqrt_series(out["w_y1"] - w_y2, order)
    den = (sqrt_series(out["wy2_Y_x1"] * out["wy2_Y_x2"], order) * out["sqrt_dt_prime_y2"]
           * out["sqrt_neg_w_prime_y2"])
    out["prefactor"] = -num / den
    return out


def integrand_W_expansion(order: int) -> PuiseuxSeries:
    """The integrand of the D(0) integral as a series in ``W`` with Laurent-polynomial coefficients in z.

    With ``u = W w(z)`` the radicand ``P - S w + w^2`` becomes
    ``(u^2 - (SW) u + P W^2)/W^2`` where ``P W^2 = (1 - W^3)^(3/2)`` and
    ``(SW)^2 = 2 P W^2 - (W^6 - 20 W^3 - 8)/4``.
    """
    Wv = T
    z = PuiseuxSeries({0: ZPoly.z(1)})
    zi = PuiseuxSeries({0: ZPoly.z(-1)})
    R = sqrt_series(1 - z * Wv**2, order=order)
    u = (Wv * zi - 1) * R
    PW2 = power(1 - Wv**3, Fraction(3, 2), order=order)
    SW = sqrt_series(2 * PW2 - (Wv**6 - 20 * Wv**3 - 8) / 4, order=order)
    num = Wv * (-R * zi + (z * Wv - Wv**2) / (2 * R))
    den = sqrt_series(u * u - SW * u + PW2, order=order)
    return num / den


def product_P_series(order: int) -> PuiseuxSeries:
    """``P = w(y1) w(y2)`` in closed form ``(1 - W^3)^(3/2) / W^2`` as a series in t."""
    W = W_series(order + 4)
    return power(1 - W**3, Fraction(3, 2), order=order + 2) / W**2


def theorem2_D0_series(N: int = 24, details: bool = False):
    """D(0) for reverse Kreweras exactly through ``t^N``.

    Three steps: the prefactor (which is ``-1/t``), the integrand expanded in
    ``W`` with Laurent coefficients in z, and the residue on the unit circle,
    followed by the substitution ``W = W(t)``.
    """
    if N < 0:
        raise TruncationInsufficient("order must be nonnegative")
    work = N + 2
    inter = series_intermediates(work + 4)
    pref = inter["prefactor"]
    integrand = integrand_W_expansion(work)
    I_W = residue_on_unit_circle(integrand)
    W = W_series(work + 1)
    I_t = I_W.compose(W)
    D0 = pref * I_t
    if D0.trunc is None or Fraction(D0.trunc, D0.q) < N + 1:
        got = None if D0.trunc is None else Fraction(D0.trunc, D0.q)
        raise TruncationInsufficient(f"D(0) known only below t^{got}, need t^{N + 1}")
    D0 = D0.truncate(N + 1)
    if details:
        return D0, {"prefactor": pref, "integrand": integrand, "I_W": I_W, "I_t": I_t, **inter}
    return D0


# reconstruction of the sections


def phi_point(x, y):
    """The point map matching the step map ``(i, j) -> (i - j, i)``: ``(x, y) -> (xy, 1/x)``."""
    return x * y, 1 / x


def phi_inverse_point(x, y):
    return 1 / y, x * y


def _check_convergence(steps_hat: StepSet, t: float, x: complex, y: complex) -> None:
    q = t * sum(abs(x) ** i * abs(y) ** j for i, j in steps_hat)
    if q >= 1:
        raise ConvergenceDomainViolated(f"t * S(|x|, |y|) = {q:.3f} >= 1 at ({x}, {y})")


def reconstruct_sections(D: Callable, kd: KernelData | KernelAtT, t: float | None, x: complex, y: complex) -> dict:
    """``L(x, y)``, ``L0-(x)`` and ``C(x, y)`` from a diagonal evaluator ``D``.

    ``L = (c(x) L0-(x) - x(x a~(y) + b~(y)/2) D(y) - xy/2 + t delta x D(0)/2) / K(x, y)`` with
    ``L0-`` read off at ``y = Y0(x)``, where the kernel vanishes.  ``C`` is
    assembled in the original coordinates from ``L`` at ``(1/y, xy)``, ``D(xy)``
    and ``L`` at ``(1/x, xy)``.
    """
    kt = _kernel_at(kd, t)
    t = kt.t
    steps_hat = phi_inverse_steps(kt.kd.steps)
    delta = steps_hat.delta(-1, -1)
    _check_convergence(steps_hat, t, x, y)
    D0 = complex(np.asarray(D(np.array([0j])))[0])
    half = 0.5

    def L_minus(u):
        Y0 = complex(np.atleast_1d(Y_branches(kt.kd, np.array([u], dtype=complex), t)[0])[0])
        DY = complex(np.asarray(D(np.array([Y0])))[0])
        c = complex(kt.c(u))
        if c == 0:
            raise KernelZero("c(x) vanishes")
        return (u / c) * (half * Y0 + (u * kt.at(Y0) + half * kt.bt(Y0)) * DY - half * t * delta * D0)

    def L(u, v):
        K = complex(kt.K(u, v))
        if abs(K) < 1e-12 * max(1.0, abs(u * v)):
            raise KernelZero(f"K vanishes at ({u}, {v})")
        Dv = complex(np.asarray(D(np.array([v], dtype=complex)))[0])
        num = (kt.c(u) * L_minus(u) - u * (u * kt.at(v) + half * kt.bt(v)) * Dv
               - half * u * v + half * t * delta * u * D0)
        return complex(num) / K

    xy = x * y
    C = L(1 / y, xy) + complex(np.asarray(D(np.array([xy])))[0]) + L(1 / x, xy)
    return {"L": L(x, y), "L0-": L_minus(x), "C": C}


def enumerated_sections(steps_hat: StepSet, N: int, t: float, x: complex, y: complex) -> dict:
    """Partial sums through ``t^N`` of the same sections, with a geometric tail bound."""
    table = count_walks(steps_hat, "three_quadrant", (0, 0), N)

    def total(which, f):
        acc = 0j
        for (n, i, j), v in extract_section(table, which).series.terms.items():
            a, b = f(i, j)
            acc += v * t**n * x**a * y**b
        return acc

    q = t * max(sum(abs(u) ** i * abs(v) ** j for i, j in steps_hat)
                for u, v in (phi_inverse_point(x, y), (x, y), phi_point(x, y)))
    tail = math.inf if q >= 1 else q ** (N + 1) / (1 - q)
    return {
        "L": total("Lhat", lambda a, b: (a - b, a)),
        "L0-": total("L0-", lambda a, b: (-b, 0)),
        "C": total("C", lambda a, b: (a, b)),
        "D": total("Dhat", lambda a, b: (0, a)),
        "tail": tail,
    }
