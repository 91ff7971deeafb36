import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trikernel.enumerate import (
    HAVE_COMPILED,
    check_functional_equation,
    count_walks,
    diagonal_series,
    extract_section,
    master_equation_residual,
)
from trikernel.errors import HypothesisViolated, StartOutsideDomain
from trikernel.model import SYMMETRIC_MODELS, StepSet, phi_transform, preset

RK_EXCURSIONS = {0: 1, 3: 4, 6: 46, 9: 706, 12: 12472, 15: 239632, 18: 4869440, 21: 102995616}

ALL_STEPS = [(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1) if (i, j) != (0, 0)]
step_sets = st.sets(st.sampled_from(ALL_STEPS), min_size=1).map(StepSet)


def test_reverse_kreweras_excursions(reverse_kreweras):
    t0 = time.perf_counter()
    table = count_walks(reverse_kreweras, "3q", (0, 0), 24)
    assert time.perf_counter() - t0 < 10
    for n, c in RK_EXCURSIONS.items():
        assert table.count(n, 0, 0) == c
    assert all(table.count(n, 0, 0) == 0 for n in range(25) if n % 3)


@given(step_sets, st.sampled_from(["3q", "quadrant", "wedge", "plane"]))
def test_empty_walk(steps, domain):
    t = count_walks(steps, domain, (0, 0), 0)
    assert list(t.cells(0)) == [(0, 0, 1)]


def test_start_outside():
    with pytest.raises(StartOutsideDomain):
        count_walks(preset("simple"), "3q", (-1, -1), 3)


def test_sections(reverse_kreweras):
    table = count_walks(reverse_kreweras, "3q", (0, 0), 6)
    D = extract_section(table, "D̂")
    assert D.coefficient(0) == 1
    assert D.coefficient(3) == 4


@pytest.mark.parametrize("model", SYMMETRIC_MODELS)
def test_upper_is_mirrored_lower(model):
    table = count_walks(preset(model), "3q", (0, 0), 8)
    L = extract_section(table, "Lhat").series
    U = extract_section(table, "Uhat").series
    assert U == L.map_exponents(lambda i, j: (j, i))


@settings(max_examples=30, deadline=None)
@given(step_sets, st.integers(0, 7))
def test_row_sums(steps, n):
    full = count_walks(steps, "plane", (0, 0), n)
    cone = count_walks(steps, "3q", (0, 0), n)
    assert full.total(n) == len(steps) ** n
    assert cone.total(n) <= len(steps) ** n


@pytest.mark.parametrize("model", SYMMETRIC_MODELS)
def test_diagonal_symmetry(model):
    table = count_walks(preset(model), "3q", (0, 0), 9)
    for n in range(10):
        for i, j, c in table.cells(n):
            assert table.count(n, j, i) == c


@pytest.mark.parametrize("model", SYMMETRIC_MODELS)
def test_wedge_matches_phi_quadrant(model):
    # counts of the lower wedge, re-indexed by phi, are the quadrant counts of the phi-image
    steps = preset(model)
    wedge = count_walks(steps, "wedge", (0, 0), 8)
    quad = count_walks(phi_transform(steps), "quadrant", (0, 0), 8)
    for n in range(9):
        image = sorted((i - j, i, c) for i, j, c in wedge.cells(n))
        assert image == sorted(quad.cells(n))


def test_simple_and_reverse_kreweras_equations():
    assert check_functional_equation(preset("simple"), 8).max_residual == 0
    assert check_functional_equation(preset("reverse-kreweras"), 12).max_residual == 0


@pytest.mark.parametrize("model", SYMMETRIC_MODELS)
def test_equations_all_models(model):
    rep = check_functional_equation(preset(model), 8)
    assert (rep.lhat, rep.octant, rep.three_quadrant, rep.quadrant) == (0, 0, 0, 0)


@pytest.mark.parametrize("model", ["reverse-kreweras", "e-ne-n-sw"])
def test_short_corner_term(model):
    # with SW as the only step having a negative coordinate the short corner term suffices
    assert master_equation_residual(preset(model), 8, short_corner=True) == 0


def test_short_corner_term_fails_elsewhere():
    assert master_equation_residual(preset("simple"), 6, short_corner=True) != 0


def test_hypothesis_required():
    with pytest.raises(HypothesisViolated):
        check_functional_equation(preset("gessel"), 4)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled extension not built")
@pytest.mark.parametrize("model", ["simple", "double-kreweras", "gessel"])
def test_compiled_matches_numpy(model):
    a = count_walks(preset(model), "3q", (0, 0), 12, backend="compiled")
    b = count_walks(preset(model), "3q", (0, 0), 12, backend="numpy")
    for n in range(13):
        assert np.array_equal(np.asarray(a.layers[n], dtype=object), np.asarray(b.layers[n], dtype=object))


def test_big_counts_are_exact():
    # 6^30 overflows int64, so the exact integer path is taken
    table = count_walks(preset("double-kreweras"), "plane", (0, 0), 30)
    assert table.total(30) == 6**30


def test_diagonal_series(reverse_kreweras):
    s = diagonal_series(reverse_kreweras, 21)
    assert [s.coefficient(n) for n in RK_EXCURSIONS] == list(RK_EXCURSIONS.values())
