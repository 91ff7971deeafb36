import csv
import io
import json

import pytest
from click.testing import CliRunner

from trikernel.cli import RunConfig, main, parse_t, thread_cap
from trikernel.errors import ValidationError
from trikernel.model import preset


def run(*args, env=None):
    result = CliRunner().invoke(main, list(args), env=env)
    return result.exit_code, result.output


def run_json(*args, env=None):
    code, out = run(*args, env=env)
    return code, json.loads(out)


def test_enumerate_single_cell():
    code, data = run_json("enumerate", "--model", "simple", "--domain", "3q", "--n", "0")
    assert code == 0
    assert data["cells"] == [[0, 0, "1"]]


def test_enumerate_counts_are_strings():
    code, data = run_json("enumerate", "--model", "reverse-kreweras", "--n", "6")
    assert code == 0
    cells = {(i, j): c for i, j, c in data["cells"]}
    assert cells[(0, 0)] == "46"
    assert all(isinstance(c, str) for c in cells.values())


def test_enumerate_to_file(tmp_path):
    out = tmp_path / "walks.json"
    code, text = run("enumerate", "--model", "simple", "--n", "2", "--out", str(out))
    assert code == 0 and text == ""
    assert json.loads(out.read_text())["n"] == 2


def test_kernel_series_and_numeric():
    code, data = run_json("kernel", "--model", "reverse-kreweras")
    assert code == 0 and "branch_points" in data
    code, data = run_json("kernel", "--model", "reverse-kreweras", "--t", "1/10")
    assert code == 0 and data["t"] == 0.1


def test_curve_csv(tmp_path):
    code, out = run("curve", "--model", "reverse-kreweras", "--t", "0.1", "--n-points", "8")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x_param", "re_y", "im_y"]
    assert len(rows) == 9
    path = tmp_path / "curve.csv"
    code, _ = run("curve", "--model", "reverse-kreweras", "--t", "0.1", "--n-points", "8", "--out", str(path))
    assert code == 0 and path.read_text() == out


def test_gluing_report():
    code, data = run_json("gluing", "--model", "reverse-kreweras", "--t", "0.1")
    assert code == 0
    assert data["gluing"] < 1e-8
    code, data = run_json("gluing", "--model", "e-w-n-s-sw", "--t", "0.05", "--check", "none")
    assert code == 0 and data["kind"]


def test_solve_matches_enumeration():
    code, data = run_json("solve", "--model", "reverse-kreweras", "--t", "0.1", "--y", "0")
    assert code == 0 and not data["flagged"]
    assert abs(data["value"]["re"] - 1.0040467187) < 1e-9
    assert data["contour"]["bounded"]


def test_solve_circle_and_thm1():
    _, a = run_json("solve", "--model", "reverse-kreweras", "--t", "0.1", "--y", "0.1+0.1j", "--route", "circle")
    _, b = run_json("solve", "--model", "reverse-kreweras", "--t", "0.1", "--y", "0.1+0.1j", "--method", "thm1")
    assert abs(a["value"]["re"] - b["value"]["re"]) < 1e-6
    assert abs(a["value"]["im"] - b["value"]["im"]) < 1e-6


def test_d0_series():
    code, out = run("d0-series", "--order", "24")
    assert code == 0
    assert out.startswith("1 + 4t³ + 46t⁶ + ")
    assert "102995616t²¹" in out
    code, data = run_json("d0-series", "--order", "9", "--json")
    assert code == 0 and data["series"].startswith("1 + 4t³")


def test_group_and_phi():
    code, data = run_json("group", "--model", "kreweras")
    assert code == 0 and data["order"] == "6" and data["finite"]
    code, data = run_json("group", "--model", "e-w-n-s-sw")
    assert code == 0 and not data["finite"]
    code, data = run_json("phi", "--model", "reverse-kreweras")
    assert code == 0 and data["satisfies_H"] and data["small"]
    assert sorted(map(tuple, data["image_steps"])) == [(-1, 0), (0, -1), (1, 1)]


def test_verify_reverse_kreweras():
    code, data = run_json("verify", "--all", "--model", "reverse-kreweras")
    assert code == 0 and data["pass"]
    names = {c["name"] for c in data["checks"]}
    assert {"index.bvp", "bvp.boundary_condition", "bvp.contour_vs_circle", "series.D0_vs_enumeration"} <= names


def test_verify_unbounded_model():
    code, data = run_json("verify", "--model", "kreweras", "--t", "0.1")
    assert code == 0
    notes = [c for c in data["checks"] if c.get("note")]
    assert notes


@pytest.mark.parametrize("args", [
    ("enumerate", "--model", "foo", "--n", "1"),
    ("enumerate", "--model", "simple", "--n", "-1"),
    ("enumerate", "--model", "simple", "--start", "a,b"),
    ("gluing", "--model", "kreweras", "--t", "0.5"),
    ("solve", "--model", "reverse-kreweras", "--t", "x"),
    ("solve", "--model", "reverse-kreweras", "--t", "0.1", "--y", "oops"),
    ("solve", "--model", "kreweras", "--t", "0.1"),
    ("curve", "--model", "reverse-kreweras"),
    ("verify", "--model", "N,S"),
])
def test_validation_exit_code(args):
    code, data = run_json(*args)
    assert code == 2
    assert data["kind"] in ("validation", "other") and data["error"]


def test_numeric_exit_code():
    code, data = run_json("solve", "--model", "reverse-kreweras", "--t", "0.1", "--y", "0.3",
                          "--method", "thm1", "--n-points", "8")
    assert code == 3
    assert data["flagged"] and data["error"] > data["tol"]


def test_thread_cap_env():
    code, data = run_json("verify", "--model", "reverse-kreweras", env={"TRIKERNEL_THREADS": "0"})
    assert code == 2 and "TRIKERNEL_THREADS" in data["message"]


@pytest.mark.parametrize("args", [
    ("d0-series", "--order", "12"),
    ("enumerate", "--model", "reverse-kreweras", "--n", "9"),
    ("solve", "--model", "reverse-kreweras", "--t", "0.1", "--y", "0.2-0.1j"),
    ("curve", "--model", "e-ne-n-sw", "--t", "0.05", "--n-points", "64"),
    ("gluing", "--model", "e-w-n-s-ne", "--t", "0.05"),
])
def test_byte_identical_runs(args):
    first, second = run(*args), run(*args)
    assert first == second


def test_run_config_bounds():
    cfg = RunConfig(preset("simple"), parse_t("1/8"))
    assert cfg.numeric_t() == 0.125
    with pytest.raises(ValidationError):
        RunConfig(preset("simple"), 0.25).numeric_t()
    with pytest.raises(ValidationError):
        RunConfig(preset("simple")).numeric_t()


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("TRIKERNEL_THREADS", "3")
    assert thread_cap() == 3
    monkeypatch.setenv("TRIKERNEL_THREADS", "many")
    with pytest.raises(ValidationError):
        thread_cap()
