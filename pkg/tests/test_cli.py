import csv
import json
import math
from pathlib import Path

import pytest
from hypothesis import given

from gseries import format_series, parse_series
from gseries.cli import CliError, cmd_series, main, parse_coefficient, parse_monomial

from conftest import HALF_ROOT2, series

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(tmp_path, capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def script(tmp_path, text):
    p = tmp_path / "s.gs"
    p.write_text(text)
    return str(p)


# -- series scripts ------------------------------------------------------------
def test_square_example():
    lines = cmd_series("A = X1^(1) + X1^(r); B = mul A A")
    assert lines[-1] == "B = X1^(2) + 2*X1^(1 + r) + X1^(2*r)"


def test_empty_script(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "series", script(tmp_path, ""))
    assert code == 0 and out == ""


def test_non_regular_prepare(tmp_path, capsys):
    path = script(tmp_path, "A = X1^(r)*Y1 @ 4\nu, w = w_prepare A\n")
    code, _, err = run(tmp_path, capsys, "series", path)
    assert code == 3
    assert "regular_order = none" in err


def test_parse_error_location(tmp_path, capsys):
    code, _, err = run(tmp_path, capsys, "series", script(tmp_path, "A = 1\nB = X1^(\n"))
    assert code == 2
    assert "line 2" in err


def test_directives_and_ops():
    lines = cmd_series("basis h = 1/2\nshape 1 1\ncap 4\n"
                       "G = Y1^2\nF = Y1 - X1^(h)\nq, r = w_divide G F\n")
    assert lines[-2:] == ["q = X1^(h) + Y1 @ 4", "r = X1^(1) @ 4"]
    lines = cmd_series("F = Y1 - X1^(1) - Y1^2 @ 5\nH = implicit_solve F")
    assert lines[-1] == "H = X1^(1) + X1^(2) + 2*X1^(3) + 5*X1^(4) + 14*X1^(5) @ 5"


def test_unknown_name_is_parse_error():
    with pytest.raises(CliError) as err:
        cmd_series("B = mul A A")
    assert err.value.code == 2


@given(series(2, 2))
def test_printed_series_round_trip(F):
    basis_line = "basis h = 1/2, r = sqrt(2)\nshape 2 2\n"
    cap = f" @ {F.cap}"
    text = format_series(F)
    lines = cmd_series(basis_line + f"A = {text}{cap}")
    printed = lines[-1].split(" = ", 1)[1].rsplit(" @ ", 1)[0]
    assert parse_series(printed, HALF_ROOT2, 2, 2, F.cap) == F


# -- config helpers ------------------------------------------------------------
def test_monomials_and_coefficients():
    assert parse_monomial("x^2*y") == (2, 1)
    assert parse_monomial("y") == (0, 1)
    assert parse_monomial([1, 3]) == (1, 3)
    with pytest.raises(ValueError):
        parse_monomial("z^2")
    c = parse_coefficient("1 + mu1", ["mu1"])
    assert c((0.5,)) == pytest.approx(1.5)


# -- pipelines -----------------------------------------------------------------
def test_dulac_linear(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "dulac", str(CONFIGS / "linear_saddle.yaml"),
                       "--out", str(tmp_path))
    assert code == 0
    rec = json.loads(out)
    assert rec["passed"] and rec["reports"][0]["expansion"] == "X1^(r)"


def test_dulac_perturbed_csv(tmp_path, capsys):
    code, _, _ = run(tmp_path, capsys, "dulac", str(CONFIGS / "perturbed_saddle.yaml"),
                     "--out", str(tmp_path))
    assert code == 0
    with open(tmp_path / "dulac_verification.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "numeric", "series", "residual"]
    assert len(rows) == 82
    t = [float(r[0]) for r in rows[1:]]
    res = [float(r[3]) for r in rows[1:]]
    slope = (math.log(res[-1]) - math.log(res[0])) / (math.log(t[-1]) - math.log(t[0]))
    assert slope >= 3.25
    summary = json.loads((tmp_path / "dulac_summary.json").read_text())
    assert summary["reports"][0]["slope"] >= 3.25


def test_dulac_resonant(tmp_path, capsys):
    code, _, err = run(tmp_path, capsys, "dulac", str(CONFIGS / "resonant_saddle.yaml"),
                       "--out", str(tmp_path))
    assert code == 3 and "ResonantWithinTolerance" in err


def test_dulac_parameterized(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "dulac", str(CONFIGS / "parameterized_saddle.yaml"),
                       "--out", str(tmp_path), "--mu", "0.1")
    assert code == 0
    assert json.loads(out)["reports"][0]["mu"] == [0.1]


def test_dulac_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        run(tmp_path, capsys, "dulac", str(CONFIGS / "perturbed_saddle.yaml"), "--out", str(d))
    assert (a / "dulac_verification.csv").read_bytes() == \
        (b / "dulac_verification.csv").read_bytes()


def test_missing_config_is_parse_error(tmp_path, capsys):
    code, _, _ = run(tmp_path, capsys, "dulac", str(tmp_path / "nope.yaml"))
    assert code == 2


def test_poincare_one_vertex(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "poincare", str(CONFIGS / "one_vertex.yaml"),
                       "--out", str(tmp_path))
    assert code == 0
    fp = json.loads((tmp_path / "poincare_fixed_points.json").read_text())["reports"][0]
    assert fp["count"] == 1
    assert fp["roots"][0] == pytest.approx(2 ** (1 / (1 - math.sqrt(2))), rel=1e-8)


def test_poincare_two_vertex(tmp_path, capsys):
    code, _, _ = run(tmp_path, capsys, "poincare", str(CONFIGS / "two_vertex.yaml"),
                     "--out", str(tmp_path))
    assert code == 0
    rec = json.loads((tmp_path / "poincare_series.json").read_text())
    assert rec["leading_exponent"] == "2" and rec["leading_exponent_value"] == 2.0


def test_poincare_identity(tmp_path, capsys):
    code, _, _ = run(tmp_path, capsys, "poincare", str(CONFIGS / "identity_polycycle.yaml"),
                     "--out", str(tmp_path))
    assert code == 0
    fp = json.loads((tmp_path / "poincare_fixed_points.json").read_text())["reports"][0]
    assert fp["count"] == 0 and fp["indeterminate_cells"] == fp["cells"]
