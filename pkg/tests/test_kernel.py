import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trikernel.errors import LeadingCoefficientVanishes, StepsTooLarge
from trikernel.kernel import (
    INF,
    TPoly,
    X_branches,
    Y_branches,
    at_t,
    branch_points_numeric,
    branch_points_series,
    build_kernel,
)
from trikernel.model import SYMMETRIC_MODELS, StepSet, phi_transform, preset
from trikernel.pseries import PuiseuxSeries

KREWERAS = preset("kreweras")


def pipeline_kernel(model):
    return build_kernel(phi_transform(preset(model)))


def test_kreweras_coefficients():
    kd = build_kernel(KREWERAS)
    assert kd.a == TPoly({(2, 1): 1})
    assert kd.b == TPoly({(0, 1): 1, (1, 0): -1})
    assert kd.c == TPoly({(1, 1): 1})
    # (t - x)^2 - 4 t^2 x^3
    assert kd.d == TPoly({(0, 2): 1, (1, 1): -2, (2, 0): 1, (3, 2): -4})
    assert (kd.at, kd.bt, kd.ct) == (kd.a, kd.b, kd.c)


def test_gessel_coefficients():
    kd = pipeline_kernel("simple")
    assert kd.a == TPoly({(2, 1): 1})
    assert kd.b == TPoly({(0, 1): 1, (2, 1): 1, (1, 0): -1})
    # SW is the only step with j = -1, so c(x) = t x * x^-1 = t
    assert kd.c == TPoly({(0, 1): 1})


def test_large_steps_rejected():
    with pytest.raises(StepsTooLarge):
        build_kernel(phi_transform(preset("diagonal")))


ALL_STEPS = [(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1) if (i, j) != (0, 0)]


@settings(max_examples=50, deadline=None)
@given(st.sets(st.sampled_from(ALL_STEPS), min_size=1).map(StepSet),
       st.complex_numbers(min_magnitude=0.1, max_magnitude=3), st.complex_numbers(min_magnitude=0.1, max_magnitude=3), st.floats(0.01, 0.3))
def test_two_expansions_agree(steps, x, y, t):
    kd = build_kernel(steps)
    by_y = kd.a(x, t) * y * y + kd.b(x, t) * y + kd.c(x, t)
    by_x = kd.at(y, t) * x * x + kd.bt(y, t) * x + kd.ct(y, t)
    direct = x * y * (t * sum(x**i * y**j for i, j in steps) - 1)
    assert abs(by_y - by_x) <= 1e-9 * max(1.0, abs(direct))
    assert abs(by_y - direct) <= 1e-9 * max(1.0, abs(direct))


def test_kreweras_branch_points_at_one_sixth():
    bp = branch_points_numeric(build_kernel(KREWERAS), 1 / 6)
    assert 0 < bp.y1 < bp.y2 < 1 < bp.y3
    assert bp.y4 == INF


def test_gessel_branch_points_at_one_eighth():
    bp = branch_points_numeric(pipeline_kernel("simple"), 1 / 8)
    xs = list(bp.x)
    assert all(np.isreal(x) and x != INF for x in xs)
    assert len(set(xs)) == 4
    assert sum(abs(x) < 1 for x in xs) == 2
    # d~ is cubic here
    assert bp.y4 == INF


@pytest.mark.parametrize("model", SYMMETRIC_MODELS)
@pytest.mark.parametrize("frac", [0.1, 0.5, 0.9])
def test_classification(model, frac):
    kd = pipeline_kernel(model)
    t = frac / len(kd.steps)
    bp = branch_points_numeric(kd, t)
    x1, x2, x3, x4 = bp.x
    assert x1 < x2 and abs(x1) < 1 and abs(x2) < 1 and x2 > 0
    assert x3 > 1
    assert x4 == INF or abs(x4) > 1
    s = np.linspace(x1, x2, 50)[1:-1]
    assert np.all(kd.d(s, t) < 0)


@pytest.mark.parametrize("model", ["reverse-kreweras", "simple", "e-ne-n-sw"])
def test_series_matches_numeric(model):
    kd = pipeline_kernel(model)
    t = 0.01
    num = branch_points_numeric(kd, t)
    ser = branch_points_series(kd, 8)
    for a, b in ((ser.x1, num.x1), (ser.x2, num.x2), (ser.y1, num.y1), (ser.y2, num.y2)):
        # truncation at t^8: the tail is far below 1e-12 at t = 0.01
        assert abs(a.evaluate(t) - b) < 1e-12


def test_small_roots_vanish_with_t():
    kd = pipeline_kernel("reverse-kreweras")
    for t in (1e-2, 1e-3, 1e-4):
        bp = branch_points_numeric(kd, t)
        assert abs(bp.x1) < 2 * t and abs(bp.x2) < 2 * t


def test_kreweras_series_branch_points():
    bp = branch_points_series(build_kernel(KREWERAS), 10)
    x1 = PuiseuxSeries.from_terms([(1, 1), ("5/2", -2), (4, 6), ("11/2", -21), (7, 80), ("17/2", "-1287/4")], 10)
    assert bp.x1.agrees_through(x1, 10)
    assert bp.y1.agrees_through(x1, 10)


@pytest.mark.parametrize("model", SYMMETRIC_MODELS)
def test_branch_identities(model):
    kd = pipeline_kernel(model)
    t = 0.5 / len(kd.steps)
    rng = np.random.default_rng(1)
    x = rng.uniform(-2, 2, 100) + 1j * rng.uniform(0.05, 2, 100)
    Y0, Y1 = Y_branches(kd, x, t)
    a, b, c = kd.a(x, t), kd.b(x, t), kd.c(x, t)
    assert np.max(np.abs(kd.K(x, Y0, t)) / np.maximum(1, np.abs(Y0) ** 2)) < 1e-10
    assert np.max(np.abs(Y0 * Y1 - c / a) / np.maximum(1, np.abs(c / a))) < 1e-10
    assert np.max(np.abs(Y0 + Y1 + b / a) / np.maximum(1, np.abs(b / a))) < 1e-10
    assert np.all(np.abs(Y0) <= np.abs(Y1))
    X0, X1 = X_branches(kd, Y0, t)
    assert np.all(np.abs(X0) <= np.abs(X1))


@pytest.mark.parametrize("model", SYMMETRIC_MODELS)
def test_conjugate_on_cut(model):
    kd = pipeline_kernel(model)
    t = 0.5 / len(kd.steps)
    bp = branch_points_numeric(kd, t)
    x = np.linspace(bp.x1, bp.x2, 30)[1:-1]
    x = x[x != 0]
    Y0, Y1 = Y_branches(kd, x, t)
    assert np.max(np.abs(Y0 - np.conj(Y1))) < 1e-10 * np.max(np.abs(Y0))
    assert np.all(Y0.imag >= 0)
    y = np.linspace(bp.y1, bp.y2, 30)[1:-1]
    y = y[y != 0]
    X0, X1 = X_branches(kd, y, t)
    assert np.max(np.abs(X0 - np.conj(X1))) < 1e-10 * np.max(np.abs(X0))


def test_kreweras_crossings():
    kt = at_t(build_kernel(KREWERAS), 1 / 6)
    assert abs(kt.Y_at_x1() - (-1 / np.sqrt(kt.bp.x1))) < 1e-10
    assert abs(kt.Y_at_x2() - 1 / np.sqrt(kt.bp.x2)) < 1e-10


@pytest.mark.parametrize("model", SYMMETRIC_MODELS)
def test_inverse_branches_and_derivative(model):
    kd = pipeline_kernel(model)
    t = 0.5 / len(kd.steps)
    kt = at_t(kd, t)
    x1, x2 = kt.bp.x1, kt.bp.x2
    k = x2 - x1
    x = np.array([(x1 + x2) / 2 + 0.2j * k, x2 + 0.3 * k + 0.1j * k, (x1 + x2) / 2 - 0.4j * k])
    Y0 = Y_branches(kd, x, t)[0]
    assert np.max(np.abs(X_branches(kd, Y0, t)[0] - x)) < 1e-12
    h = 1e-6
    dY = (Y_branches(kd, x + h, t)[0] - Y_branches(kd, x - h, t)[0]) / (2 * h)
    assert np.max(np.abs(-kt.sqrt_d(x) * dY - kt.sqrt_dt(Y0))) < 1e-6


def test_leading_coefficient_vanishes():
    kd = pipeline_kernel("reverse-kreweras")
    with pytest.raises(LeadingCoefficientVanishes):
        Y_branches(kd, 0.0, 0.1)


@pytest.mark.parametrize("model", SYMMETRIC_MODELS)
def test_sqrt_determination(model):
    kt = at_t(pipeline_kernel(model), 0.5 / len(phi_transform(preset(model))))
    x2, x3 = kt.bp.x2, kt.bp.x3
    s = np.linspace(x2, x3, 20)[1:-1]
    assert np.all(np.real(kt.sqrt_d(s)) > 0)
    assert np.max(np.abs(kt.sqrt_d(s) ** 2 - kt.d(s))) < 1e-10
