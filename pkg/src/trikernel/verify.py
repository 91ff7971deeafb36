"""The property checks behind ``trikernel verify``; each returns name, value, tolerance and verdict."""

from __future__ import annotations

from concurrent.futures import Executor
from typing import Callable

import numpy as np

from .errors import TrikernelError
from .kernel import INF
from .model import StepSet, group_order, phi_transform, preset, validate

BOUNDARY_T = 0.05
BOUNDARY_ORDER = 30
INTERIOR_POINTS = np.array([0.0, 0.05, 0.1, -0.1, 0.2, -0.25, 0.1 + 0.1j, -0.1 + 0.2j, 0.3j, 0.15 - 0.15j])


def default_t(steps: StepSet) -> float:
    return 0.1 if len(steps) < 6 else 0.05


def _entry(name: str, value, tol, ok: bool, **extra) -> dict:
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    return {"name": name, "value": value, "tol": tol, "pass": bool(ok), **extra}


def _not_applicable(name: str) -> dict:
    return _entry(name, None, None, True, note="unbounded contour: not applicable")


def _guard(name: str, fn: Callable[[], list[dict]]) -> list[dict]:
    try:
        return fn()
    except TrikernelError as exc:
        return [_entry(name, None, None, False, error=type(exc).__name__, message=str(exc))]


def check_equations(steps: StepSet, N: int = 8) -> list[dict]:
    from .enumerate import check_functional_equation

    rep = check_functional_equation(steps, N)
    return [_entry(f"equation.{k}", str(getattr(rep, k)), "0", getattr(rep, k) == 0)
            for k in ("lhat", "octant", "three_quadrant", "quadrant")]


def check_group(steps: StepSet) -> list[dict]:
    return [_entry("group.order", str(group_order(steps)), None, True)]


def check_index(steps: StepSet, t: float) -> list[dict]:
    from .bvp import setup
    from .geometry import bvp_index, discriminant_winding, trace_curve

    pr = setup(steps, t)
    contour = trace_curve(pr.kt)
    if contour.unbounded:
        return [_not_applicable("index")]
    wind = discriminant_winding(contour, pr.kt)
    index = bvp_index(contour, pr.kt)
    return [_entry("index.winding_dt", wind, 2, wind == 2), _entry("index.bvp", index, -1, index == -1)]


CONFORMAL_TOL = {
    "gluing": (1e-8, 1e-6), "ode": (1e-7, 1e-5), "anti_tutte_modulus": 1e-6, "decoupling": 1e-6,
    "f_over_sqrt": 1e-6, "sqrt_ratio": 1e-6, "f_closed_vs_ratio": 1e-5,
    "gessel_g_product": 1e-8, "gessel_decoupling": 1e-6,
}


def check_conformal(steps: StepSet, t: float) -> list[dict]:
    from .bvp import setup
    from .conformal import property_report

    report = property_report(setup(steps, t).kt)
    explicit = report["kind"].startswith("MoebiusOf")
    out = []
    for key, value in report.items():
        if key in ("kind", "bounded"):
            continue
        if key == "injectivity_margin":
            out.append(_entry(f"conformal.{key}", value, "> 0", value > 0))
        elif key == "sign_min":
            out.append(_entry(f"conformal.{key}", value, "> 0", value > 0))
        else:
            tol = CONFORMAL_TOL[key]
            if isinstance(tol, tuple):
                tol = tol[0] if explicit else tol[1]
            out.append(_entry(f"conformal.{key}", value, tol, value < tol))
    return out


def check_boundary(steps: StepSet) -> list[dict]:
    from .bvp import DiagonalOracle, boundary_residual, setup
    from .errors import TruncationTailTooLarge
    from .geometry import trace_curve

    pr = setup(steps, BOUNDARY_T)
    contour = trace_curve(pr.kt)
    if contour.unbounded:
        return [_not_applicable("bvp.boundary_condition")]
    oracle = DiagonalOracle.build(steps, BOUNDARY_ORDER)
    try:
        res = boundary_residual(pr.kt, contour, BOUNDARY_T, oracle, 40)
    except TruncationTailTooLarge as exc:
        return [_entry("bvp.boundary_condition", None, 1e-7, True, skipped=True, note=str(exc))]
    return [_entry("bvp.boundary_condition", res, 1e-7, res < 1e-7, t=BOUNDARY_T, order=BOUNDARY_ORDER)]


def check_solutions(steps: StepSet, t: float) -> list[dict]:
    from .bvp import DiagonalOracle, make_evaluator, setup
    from .conformal import has_explicit

    pr = setup(steps, t)
    if pr.kt.Y_at_x1() == INF:
        return [_not_applicable("bvp.solutions")]
    ev2 = make_evaluator(pr.kt, method="thm2")
    ev1 = make_evaluator(pr.kt, method="thm1")
    d2, d1 = ev2(INTERIOR_POINTS), ev1(INTERIOR_POINTS)
    rel = float(np.max(np.abs(d1 - d2) / np.abs(d2)))
    oracle = DiagonalOracle.build(steps, 30)
    tail = oracle.tail_bound(float(np.max(np.abs(INTERIOR_POINTS))), t)
    err = float(np.max(np.abs(d2 - oracle(INTERIOR_POINTS, t))))
    out = [_entry("bvp.thm1_vs_thm2", rel, 1e-4, rel < 1e-4),
           _entry("bvp.thm2_vs_enumeration", err, 1e-6, err + tail < 1e-6, tail_bound=tail)]
    if has_explicit(pr.kd.steps):
        evc = make_evaluator(pr.kt, method="thm2", route="circle")
        inner = INTERIOR_POINTS[np.abs(INTERIOR_POINTS) < 0.5]
        diff = float(np.max(np.abs(evc(inner) - ev2(inner))))
        out.append(_entry("bvp.contour_vs_circle", diff, 1e-8, diff < 1e-8))
    return out


def check_series(steps: StepSet) -> list[dict]:
    from .bvp import DiagonalOracle, theorem2_D0_series

    if steps != preset("reverse-kreweras"):
        return []
    D0 = theorem2_D0_series(24)
    ref = DiagonalOracle.build(steps, 24).series_at_zero()
    bad = [n for n in range(25) if D0.coefficient(n) != ref.coefficient(n)]
    return [_entry("series.D0_vs_enumeration", len(bad), 0, not bad, order=24)]


def run_checks(steps: StepSet, t: float | None, pool: Executor) -> list[dict]:
    """Every applicable check for a model satisfying the symmetry hypothesis, in a fixed order."""
    from .errors import HypothesisViolated

    if not validate(steps).satisfies_H:
        raise HypothesisViolated(f"{steps.label()} is not symmetric or has an antidiagonal step")
    if not phi_transform(steps).is_small():
        raise HypothesisViolated("the phi-image has large steps")
    t = default_t(steps) if t is None else t
    jobs = [
        ("equations", lambda: check_equations(steps)),
        ("group", lambda: check_group(steps)),
        ("index", lambda: check_index(steps, t)),
        ("conformal", lambda: check_conformal(steps, t)),
        ("boundary", lambda: check_boundary(steps)),
        ("solutions", lambda: check_solutions(steps, t)),
        ("series", lambda: check_series(steps)),
    ]
    futures = [pool.submit(_guard, name, fn) for name, fn in jobs]
    results = []
    for f in futures:
        results.extend(f.result())
    return results
