"""One test per acceptance criterion; each prints a single PASS/FAIL line (collected in the summary)."""

import time
from fractions import Fraction

import numpy as np

from trikernel.bvp import (
    DiagonalOracle,
    boundary_residual,
    make_evaluator,
    series_intermediates,
    setup,
    theorem2_D0_series,
)
from trikernel.conformal import W_series, property_report
from trikernel.enumerate import check_functional_equation, count_walks
from trikernel.geometry import bvp_index, discriminant_winding, trace_curve
from trikernel.model import group_order, preset
from trikernel.pseries import PuiseuxSeries, sqrt_series

EIGHT_MODELS = ["simple", "kreweras", "reverse-kreweras", "double-kreweras",
                "e-ne-n-sw", "w-ne-s-sw", "e-w-n-s-sw", "e-w-n-s-ne"]
BOUNDED = ["simple", "reverse-kreweras", "double-kreweras", "e-ne-n-sw", "e-w-n-s-sw", "e-w-n-s-ne"]
EXCURSIONS = {0: 1, 3: 4, 6: 46, 9: 706, 12: 12472, 15: 239632, 18: 4869440, 21: 102995616}
INTERIOR = np.array([0.0, 0.05, 0.1, -0.1, 0.2, -0.25, 0.1 + 0.1j, -0.1 + 0.2j, 0.3j, 0.15 - 0.15j])


def ps(terms, order):
    return PuiseuxSeries.from_terms([(Fraction(e), Fraction(c)) for e, c in terms], order)


def test_criterion_1_enumeration(criterion):
    with criterion(1, "reverse-Kreweras excursions through n = 21, n <= 24 under 10 s") as c:
        t0 = time.perf_counter()
        table = count_walks(preset("reverse-kreweras"), "3q", (0, 0), 24)
        elapsed = time.perf_counter() - t0
        for n, count in EXCURSIONS.items():
            c.check(f"n={n}", table.count(n, 0, 0) == count, str(table.count(n, 0, 0)))
        c.check("runtime", elapsed < 10, f"{elapsed:.2f}s")


def test_criterion_2_exact_D0_series(criterion):
    with criterion(2, "exact D(0) series equals enumeration through t^21, under 60 s") as c:
        t0 = time.perf_counter()
        D0 = theorem2_D0_series(24)
        elapsed = time.perf_counter() - t0
        exc = count_walks(preset("reverse-kreweras"), "3q", (0, 0), 24).excursions()
        bad = [n for n in range(22) if D0.coefficient(n) != exc[n]]
        c.check("coefficients", not bad, f"mismatch at {bad}")
        c.check("runtime", elapsed < 60, f"{elapsed:.2f}s")


def test_criterion_3_reference_intermediates(criterion):
    with criterion(3, "reference intermediate series of the reverse-Kreweras pipeline") as c:
        inter = series_intermediates(16)
        _, det = theorem2_D0_series(24, details=True)
        W = W_series(12)
        c.check("W", W.agrees_through(ps([(1, 2), (4, 8), (7, 96), (10, 1536)], 11), 11))
        c.check("x1", inter["x1"].agrees_through(
            ps([(1, 1), ("5/2", -2), (4, 6), ("11/2", -21), (7, 80), ("17/2", "-1287/4")], 9), Fraction(17, 2)))
        c.check("x2", inter["x2"].agrees_through(
            ps([(1, 1), ("5/2", 2), (4, 6), ("11/2", 21), (7, 80), ("17/2", "1287/4")], 9), Fraction(17, 2)))
        c.check("sqrt dt'(y2)", inter["sqrt_dt_prime_y2"].agrees_through(
            ps([("5/4", 2), ("17/4", "-3/2"), ("23/4", -8), ("29/4", "-603/16"), ("35/4", -174)], "41/4"),
            Fraction(35, 4)))
        c.check("w(y2)", inter["w_y2"].agrees_through(
            ps([(-1, "1/2"), ("1/2", -2), (2, -1), ("7/2", -3), (5, -7), ("13/2", "-115/4"),
                (8, -90), ("19/2", "-3247/8")], 10), Fraction(19, 2)))
        c.check("sqrt(-w'(y2))", inter["sqrt_neg_w_prime_y2"].agrees_through(
            ps([(-1, 1), ("1/2", -2), (2, "-5/2"), ("7/2", -6), (5, "-169/8"), ("13/2", -75),
                (8, "-4957/16"), ("19/2", -1251)], 10), Fraction(19, 2)))
        c.check("w_y2(y1)", inter["wy2_y1"].agrees_through(
            ps([("-1/2", "1/4"), ("5/2", "-3/8"), ("11/2", "-97/32"), ("17/2", "-2611/64")], "23/2"),
            Fraction(17, 2)))
        c.check("w_y2(Y(x1))", inter["wy2_Y_x1"].agrees_through(ps([(1, -1), (4, -2), (7, -18)], 10), 7))
        c.check("w_y2(Y(x2))", inter["wy2_Y_x2"].agrees_through(
            ps([(1, -1), ("5/2", -4), (4, -18), ("11/2", -86), (7, -418), ("17/2", "-4131/2")], 9),
            Fraction(17, 2)))
        pref = det["prefactor"]
        c.check("prefactor", pref.agrees_through(ps([(-1, -1)], 10), 9), str(pref.truncate(10)))
        integral = ps([(1, -1), (4, -4), (7, -46), (10, -706), (13, -12472), (16, -239632), (19, -4869440)], 20)
        c.check("integral", det["I_t"].agrees_through(integral, 19))
        c.check("sqrt consistency", (inter["sqrt_dt_prime_y2"] ** 2).agrees_through(
            inter["dt_prime_y2"], 9) and sqrt_series(inter["dt_prime_y2"], 12).agrees_through(
            inter["sqrt_dt_prime_y2"], 9))


def test_criterion_4_functional_equations(criterion):
    with criterion(4, "functional equations with zero residual through t^8, all 8 models") as c:
        for name in EIGHT_MODELS:
            rep = check_functional_equation(preset(name), 8)
            c.check(name, rep.max_residual == 0, str(rep.as_dict()))


def test_criterion_5_group_orders(criterion):
    expected = {"simple": "4", "kreweras": "6", "reverse-kreweras": "6", "double-kreweras": "6",
                "e-ne-n-sw": "Infinite(400)", "w-ne-s-sw": "Infinite(400)",
                "e-w-n-s-sw": "Infinite(400)", "e-w-n-s-ne": "Infinite(400)"}
    with criterion(5, "group orders 4, 6, 6, 6 and Infinite(400) for the other four") as c:
        for name, order in expected.items():
            got = str(group_order(preset(name)))
            c.check(name, got == order, got)


def test_criterion_6_index(criterion):
    with criterion(6, "winding of d~ = 2 and index = -1, bounded models, t in {0.05, 0.1}") as c:
        for name in BOUNDED:
            for t in (0.05, 0.1):
                pr = setup(name, t)
                contour = trace_curve(pr.kt)
                c.check(f"{name}@{t} bounded", not contour.unbounded)
                wind, index = discriminant_winding(contour, pr.kt), bvp_index(contour, pr.kt)
                c.check(f"{name}@{t}", wind == 2 and index == -1, f"winding {wind}, index {index}")


def test_criterion_7_conformal(criterion):
    with criterion(7, "gluing, w-ODE, decoupling and Gessel anti-Tutte residuals") as c:
        for name in BOUNDED:
            t = 0.1 if len(preset(name)) < 6 else 0.05
            rep = property_report(setup(name, t).kt, samples=50)
            explicit = rep["kind"].startswith("MoebiusOf")
            c.check(f"{name} gluing", rep["gluing"] < (1e-8 if explicit else 1e-6), f"{rep['gluing']:.2e}")
            c.check(f"{name} ode", rep["ode"] < (1e-7 if explicit else 1e-5), f"{rep['ode']:.2e}")
            for key in ("decoupling", "anti_tutte_modulus", "f_over_sqrt"):
                c.check(f"{name} {key}", rep[key] < 1e-6, f"{rep[key]:.2e}")
            if name == "simple":
                c.check("gessel g product", rep["gessel_g_product"] < 1e-8, f"{rep['gessel_g_product']:.2e}")
                c.check("gessel decoupling", rep["gessel_decoupling"] < 1e-6)


def test_criterion_8_cross_checks(criterion):
    with criterion(8, "thm1 vs thm2, thm2(0) vs enumeration, contour vs unit circle") as c:
        for name in BOUNDED:
            t = 0.1 if len(preset(name)) < 6 else 0.05
            pr = setup(name, t)
            d2 = make_evaluator(pr.kt, method="thm2")(INTERIOR)
            d1 = make_evaluator(pr.kt, method="thm1")(INTERIOR)
            rel = float(np.max(np.abs(d1 - d2) / np.abs(d2)))
            c.check(f"{name} thm1/thm2", rel < 1e-4, f"{rel:.2e}")
        pr = setup("reverse-kreweras", 0.1)
        oracle = DiagonalOracle.build(pr.steps_hat, 24)
        value = make_evaluator(pr.kt, method="thm2").evaluate(0.0).value
        err = abs(value - oracle(np.array([0.0]), 0.1)[0]) + oracle.tail_bound(0.0, 0.1)
        c.check("thm2(0) vs enumeration", err < 1e-6, f"{err:.2e}")
        for name in ("reverse-kreweras", "double-kreweras"):
            pr = setup(name, 0.05)
            inner = INTERIOR[np.abs(INTERIOR) < 0.5]
            a = make_evaluator(pr.kt, method="thm2")(inner)
            b = make_evaluator(pr.kt, method="thm2", route="circle")(inner)
            diff = float(np.max(np.abs(a - b)))
            c.check(f"{name} contour/circle", diff < 1e-8, f"{diff:.2e}")


def test_criterion_9_boundary_condition(criterion):
    with criterion(9, "boundary condition residual at t = 0.05, order 30, 40 samples") as c:
        pr = setup("reverse-kreweras", 0.05)
        oracle = DiagonalOracle.build(pr.steps_hat, 30)
        res = boundary_residual(pr.kt, trace_curve(pr.kt), 0.05, oracle, 40)
        c.check("reverse-kreweras", res < 1e-7, f"{res:.2e}")
