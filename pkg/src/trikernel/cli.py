"""Command-line front end: ``trikernel <command> ...``.

Structured output is JSON (exact integers and rationals as decimal strings,
floating-point values as numbers); contour dumps are CSV.  Exit codes are 0 on
success, 2 for invalid input and 3 when a numeric check fails its tolerance.
"""

from __future__ import annotations

import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import click

from .errors import NumericError, TrikernelError, ValidationError
from .model import StepSet, group_order, load_model, phi_transform, validate

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3


@dataclass(frozen=True)
class RunConfig:
    model: StepSet
    t: Fraction | float | None = None
    order: int = 24
    n_points: int = 2048
    tol: float = 1e-6

    def numeric_t(self) -> float:
        """``t`` as a float, after checking ``0 < t < 1/|S|``."""
        if self.t is None:
            raise ValidationError("this command needs --t")
        t = float(self.t)
        if not 0 < t < 1 / len(self.model):
            raise ValidationError(f"t = {self.t} is outside (0, 1/{len(self.model)})")
        return t


def parse_t(text: str | None) -> Fraction | float | None:
    if text is None:
        return None
    try:
        return Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"cannot parse t = {text!r}") from None


def thread_cap() -> int:
    raw = os.environ.get("TRIKERNEL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"TRIKERNEL_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError(f"TRIKERNEL_THREADS must be a positive integer, got {raw!r}")
    return n


def _emit(data, out: str | None = None) -> None:
    text = json.dumps(data, indent=2, ensure_ascii=False)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _complex(v) -> dict:
    v = complex(v)
    return {"re": v.real, "im": v.imag}


def _run(fn: Callable[[], int | None]) -> None:
    try:
        code = fn() or EXIT_OK
    except ValidationError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc), "kind": "validation"})
        sys.exit(EXIT_VALIDATION)
    except NumericError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc), "kind": "numeric"})
        sys.exit(EXIT_NUMERIC)
    except TrikernelError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc), "kind": "other"})
        sys.exit(EXIT_VALIDATION)
    sys.exit(code)


model_option = click.option("--model", "model", required=True, help="Preset name, JSON file, or compass list.")
t_option = click.option("--t", "t", default=None, help="Value of t (decimal or p/q).")


@click.group()
def main():
    """Walks in the three-quadrant cone: enumeration and the analytic pipeline."""


@main.command("enumerate")
@model_option
@click.option("--domain", default="3q", show_default=True)
@click.option("--n", "n", type=int, default=0, show_default=True)
@click.option("--start", default="0,0", show_default=True)
@click.option("--out", default=None)
def enumerate_cmd(model, domain, n, start, out):
    """Counts of n-step walks per endpoint."""
    from .enumerate import count_walks

    def run():
        steps = load_model(model)
        if n < 0:
            raise ValidationError("--n must be nonnegative")
        try:
            origin = tuple(int(v) for v in start.split(","))
        except ValueError:
            raise ValidationError(f"bad --start {start!r}") from None
        table = count_walks(steps, domain, origin, n)
        cells = [[i, j, str(c)] for i, j, c in table.cells(n)]
        _emit({"model": steps.label(), "domain": table.domain, "start": list(origin), "n": n, "cells": cells}, out)

    _run(run)


@main.command()
@model_option
@t_option
@click.option("--raw", is_flag=True, help="Use the steps as given instead of their phi-image.")
@click.option("--json", "as_json", is_flag=True, help="Accepted for symmetry; output is always JSON.")
def kernel(model, t, raw, as_json):
    """Kernel coefficients, discriminants and branch points."""
    from .kernel import branch_points_numeric, branch_points_series, build_kernel

    def run():
        steps = load_model(model)
        cfg = RunConfig(steps, parse_t(t))
        kd = build_kernel(steps if raw else phi_transform(steps))
        data = {"model": steps.label(), "kernel": kd.to_json()}
        if cfg.t is None:
            data["branch_points"] = branch_points_series(kd, 6).to_json()
        else:
            data["t"] = float(cfg.t)
            data["branch_points"] = branch_points_numeric(kd, RunConfig(kd.steps, cfg.t).numeric_t()).to_json()
        _emit(data)

    _run(run)


@main.command()
@model_option
@t_option
@click.option("--n-points", type=int, default=2048, show_default=True)
@click.option("--out", default=None, help="CSV path (stdout when omitted).")
def curve(model, t, n_points, out):
    """Samples (x_param, Re y, Im y) of the curve L."""
    from .geometry import trace_curve
    from .kernel import build_kernel

    def run():
        steps = load_model(model)
        kd = build_kernel(phi_transform(steps))
        tt = RunConfig(steps, parse_t(t)).numeric_t()
        contour = trace_curve(kd, tt, n_points)
        fh = open(out, "w", newline="") if out else sys.stdout
        try:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x_param", "re_y", "im_y"])
            for row in contour.to_rows():
                writer.writerow([repr(v) for v in row])
        finally:
            if out:
                fh.close()

    _run(run)


@main.command()
@model_option
@t_option
@click.option("--check", type=click.Choice(["all", "none"]), default="all", show_default=True)
@click.option("--prefer", type=click.Choice(["auto", "explicit", "weierstrass"]), default="auto")
def gluing(model, t, check, prefer):
    """Gluing function kind and, with --check all, every property residual."""
    from .bvp import setup
    from .conformal import gluing_for, property_report

    def run():
        steps = load_model(model)
        pr = setup(steps, RunConfig(steps, parse_t(t)).numeric_t())
        if check == "none":
            w = gluing_for(pr.kt, prefer)
            _emit({"model": steps.label(), "t": pr.t, "kind": w.kind, "pole": _complex(w.pole)})
            return
        report = property_report(pr.kt, prefer)
        _emit({"model": steps.label(), "t": pr.t, **report})

    _run(run)


@main.command()
@model_option
@t_option
@click.option("--y", "y", default="0", help="Evaluation point (complex literal, e.g. 0.1+0.2j).")
@click.option("--method", type=click.Choice(["thm1", "thm2"]), default="thm2", show_default=True)
@click.option("--route", type=click.Choice(["contour", "circle"]), default="contour", show_default=True)
@click.option("--n-points", type=int, default=None)
@click.option("--tol", type=float, default=RunConfig.tol, show_default=True, help="Largest accepted error estimate.")
@click.option("--json", "as_json", is_flag=True, help="Accepted for symmetry; output is always JSON.")
def solve(model, t, y, method, route, n_points, tol, as_json):
    """D(y) by one of the two solution formulas."""
    from .bvp import make_evaluator, setup

    def run():
        steps = load_model(model)
        pr = setup(steps, RunConfig(steps, parse_t(t)).numeric_t())
        try:
            yv = complex(y.replace(" ", ""))
        except ValueError:
            raise ValidationError(f"cannot parse y = {y!r}") from None
        ev = make_evaluator(pr.kt, method=method, n_points=n_points, route=route)
        res = ev.evaluate(yv)
        contour = getattr(ev.solver, "contour", None)
        meta = {"route": res.contour, "n_points": res.n_points}
        if contour is not None:
            meta["bounded"] = not contour.unbounded
            meta["crossings"] = [float(c) for c in contour.crossings]
        flagged = not res.error <= tol
        _emit({"model": steps.label(), "t": pr.t, "method": method, "y": _complex(yv),
               "value": _complex(res.value), "error": res.error, "tol": tol, "flagged": flagged, "contour": meta})
        return EXIT_NUMERIC if flagged else EXIT_OK

    _run(run)


@main.command("d0-series")
@click.option("--order", type=int, default=24, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def d0_series(order, as_json):
    """Exact series of D(0) for reverse Kreweras."""
    from .bvp import theorem2_D0_series

    def run():
        s = theorem2_D0_series(order)
        if as_json:
            _emit({"order": order, "series": s.pretty(), "coefficients": s.to_quadruples()})
        else:
            click.echo(s.pretty())

    _run(run)


@main.command()
@model_option
def group(model):
    """Order of the group of the walk."""

    def run():
        steps = load_model(model)
        g = group_order(steps)
        _emit({"model": steps.label(), "order": str(g), "finite": g.is_finite})

    _run(run)


@main.command()
@model_option
def phi(model):
    """The step set after the change of variables (i, j) -> (i - j, i)."""

    def run():
        steps = load_model(model)
        image = phi_transform(steps)
        v = validate(steps)
        _emit({"model": steps.label(), "satisfies_H": v.satisfies_H, "image": image.compass(),
               "image_steps": [list(s) for s in image.steps], "small": image.is_small()})

    _run(run)


@main.command()
@model_option
@t_option
@click.option("--all", "run_all", is_flag=True, help="Run every check (the default set is the same).")
def verify(model, t, run_all):
    """Run the property checks of every module and report each residual."""
    from .verify import run_checks

    def run():
        steps = load_model(model)
        tt = None if t is None else RunConfig(steps, parse_t(t)).numeric_t()
        with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
            results = run_checks(steps, tt, pool)
        ok = all(r["pass"] for r in results)
        _emit({"model": steps.label(), "pass": ok, "checks": results})
        return EXIT_OK if ok else EXIT_NUMERIC

    _run(run)


if __name__ == "__main__":  # pragma: no cover
    main()
