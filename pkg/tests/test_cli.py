import csv
import hashlib
import io
import json
import math
import subprocess
import sys

import pytest
from oracles import GAMMA_Q3, Q3, cantor_function

from fractalcalc.cli import EXIT_INPUT, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, list(reader)


# {{{ set


def test_set_depth_one(capsys):
    code, out, _ = run(capsys, "set", "--p", "3", "--depth", "1")
    assert code == 0
    header, rows = rows_of(out)
    assert header == ["lo", "hi", "address"]
    assert [r[2] for r in rows] == ["0", "1"]
    assert float(rows[0][0]) == 0.0 and float(rows[0][1]) == pytest.approx(1 / 3, abs=1e-16)
    assert float(rows[1][0]) == pytest.approx(2 / 3, abs=1e-16) and float(rows[1][1]) == 1.0
    # address strings are quoted so "0" and "" survive spreadsheet round trips
    assert out.splitlines()[1].endswith(',"0"')


def test_set_depth_zero(capsys):
    _, out, _ = run(capsys, "set", "--p", "3", "--depth", "0")
    assert out.splitlines()[1] == '0.0,1.0,""'


def test_set_middle_quarter_widths(capsys, tmp_path):
    desc = tmp_path / "set.json"
    _, out, _ = run(capsys, "set", "--p", "4", "--depth", "2", "--json", str(desc))
    _, rows = rows_of(out)
    assert len(rows) == 4
    for lo, hi, _ in rows:
        assert float(hi) - float(lo) == pytest.approx((3 / 8) ** 2, rel=1e-14)

    data = json.loads(desc.read_text())
    assert data["dimension"] == pytest.approx(math.log(2) / math.log(8 / 3), rel=1e-14)
    # the description feeds back into --set
    _, again, _ = run(capsys, "set", "--set", str(desc), "--depth", "2")
    assert again == out


@pytest.mark.parametrize("argv", [["--p", "1.5"], ["--p", "3", "--depth", "41"], ["--p", "3", "--depth", "-1"]])
def test_set_errors(capsys, argv):
    code, out, err = run(capsys, "set", *argv)
    assert code == EXIT_INPUT
    assert out == ""
    assert "error" in err


def test_set_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "set", "--set", str(tmp_path / "missing.json"))
    assert code == EXIT_INPUT
    assert "cannot read" in err


# }}}


# {{{ staircase


def test_staircase(capsys):
    _, out, _ = run(capsys, "staircase", "--p", "3", "--grid", "11")
    header, rows = rows_of(out)
    assert header == ["x", "P"]
    values = [(float(x), float(p)) for x, p in rows]
    assert values[0] == (0.0, 0.0)
    assert values[-1][1] == pytest.approx(1 / GAMMA_Q3, rel=1e-12)
    in_gap = {p for x, p in values if 1 / 3 < x < 2 / 3}
    assert len(in_gap) == 1
    for x, p in values:
        assert p == pytest.approx(cantor_function(x) / GAMMA_Q3, abs=1e-9)


def test_staircase_grid_too_small(capsys):
    code, _, err = run(capsys, "staircase", "--grid", "1")
    assert code == EXIT_INPUT
    assert "at least 2" in err


# }}}


# {{{ integrate


def integrate(capsys, *argv):
    code, out, _ = run(capsys, "integrate", *argv)
    assert code == 0
    return json.loads(out)


def test_integrate_constant(capsys):
    result = integrate(capsys, "--gbar", "one", "--depth", "6")
    assert result["value"] == pytest.approx(1 / GAMMA_Q3, rel=1e-14)
    assert result["lower"] == result["upper"] == result["value"]
    assert result["method"] == "riemann_cover"
    assert result["certified"]


@pytest.mark.parametrize("gbar, moment", [("x", 0.5), ("x2", 0.375)])
def test_integrate_moments(capsys, gbar, moment):
    rie = integrate(capsys, "--gbar", gbar, "--depth", "12")
    assert rie["lower"] <= moment / GAMMA_Q3 <= rie["upper"]
    rec = integrate(capsys, "--gbar", gbar, "--method", "recursive", "--depth", "20")
    assert rec["value"] * GAMMA_Q3 == pytest.approx(moment, abs=1e-10)
    assert rec["method"] == "self_similar_recursion"


def test_integrate_lipschitz_modes(capsys):
    assert not integrate(capsys, "--gbar", "x", "--lipschitz", "none")["certified"]
    assert integrate(capsys, "--gbar", "x", "--lipschitz", "2.5")["certified"]
    code, _, _ = run(capsys, "integrate", "--gbar", "x", "--lipschitz", "big")
    assert code == EXIT_INPUT


def test_integrate_range(capsys):
    result = integrate(capsys, "--gbar", "one", "--range", "0", "0.5", "--depth", "8")
    assert result["value"] == pytest.approx(0.5 / GAMMA_Q3, rel=1e-14)
    code, _, err = run(capsys, "integrate", "--method", "recursive", "--range", "0", "0.5")
    assert code == EXIT_INPUT
    assert "full ambient" in err


def test_integrate_terms(capsys):
    result = integrate(
        capsys, "--term", "one", "3", "0", "1", "--term", "poly:[2]", "3", "2", "3", "--depth", "8"
    )
    assert result["value"] == pytest.approx(3 / GAMMA_Q3, rel=1e-14)

    code, _, err = run(capsys, "integrate", "--term", "one", "3", "0", "1", "--term", "one", "4", "2", "3")
    assert code == EXIT_INPUT
    assert "dimension" in err
    code, _, _ = run(capsys, "integrate", "--term", "one", "three", "0", "1")
    assert code == EXIT_INPUT


def test_integrate_bad_gbar(capsys):
    code, _, err = run(capsys, "integrate", "--gbar", "sin")
    assert code == EXIT_INPUT
    assert "unknown integrand" in err


# }}}


# {{{ solve


def write_problem(tmp_path, **data):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps({"set": {"p": 3, "ambient": [0, 1]}, **data}))
    return str(path)


def test_solve_linear(capsys, tmp_path):
    problem = write_problem(tmp_path, h={"kind": "linear"}, x0=0.0, y0=1.0)
    manifest = tmp_path / "manifest.json"
    code, out, _ = run(capsys, "solve", "--problem", problem, "--grid", "101", "--manifest", str(manifest))
    assert code == 0
    header, rows = rows_of(out)
    assert header == ["x", "y", "lower", "upper"]
    assert len(rows) == 101
    for x, y, lo, hi in rows:
        assert float(y) == pytest.approx(math.exp(cantor_function(float(x)) / GAMMA_Q3), rel=1e-9)
        assert float(lo) <= float(y) <= float(hi)

    data = json.loads(manifest.read_text())
    assert data["extra"]["truncated"] is False
    assert data["checksum"] == hashlib.sha256(out.encode()).hexdigest()


def test_solve_constant_one(capsys, tmp_path):
    problem = write_problem(tmp_path, x0=0.0, y0=2.0)
    _, out, _ = run(capsys, "solve", "--problem", problem, "--grid", "21")
    _, stair, _ = run(capsys, "staircase", "--grid", "21")
    _, rows = rows_of(out)
    _, srows = rows_of(stair)
    for (x, y, _, _), (xs, p) in zip(rows, srows):
        assert x == xs
        assert float(y) - 2.0 == pytest.approx(float(p), abs=1e-15)


def test_solve_blowup_truncates(capsys, tmp_path):
    problem = write_problem(tmp_path, h={"kind": "quadratic"}, x0=0.0, y0=1.0)
    manifest = tmp_path / "manifest.json"
    code, out, err = run(capsys, "solve", "--problem", problem, "--grid", "101", "--manifest", str(manifest))
    assert code == 0
    _, rows = rows_of(out)
    assert float(rows[-1][0]) < 0.9661293373
    data = json.loads(manifest.read_text())
    assert data["extra"]["truncated"] is True
    assert data["extra"]["blowup"] == pytest.approx(0.96612933732726074, abs=1e-10)
    assert "leaves its branch" in err


def test_solve_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run(capsys, "solve", "--problem", str(bad))
    assert code == EXIT_INPUT

    problem = write_problem(tmp_path, h={"kind": "cubic"}, y0=1.0)
    code, _, err = run(capsys, "solve", "--problem", problem)
    assert code == EXIT_INPUT
    assert "unknown h kind" in err


# }}}


# {{{ lfd


def lfd(capsys, *argv):
    code, out, _ = run(capsys, "lfd", *argv)
    assert code == 0
    return json.loads(out)


def test_lfd_builtin_power(capsys):
    result = lfd(capsys, "--builtin", "power:0.5", "--at", "0", "--q", "0.5")
    assert result["critical_order"] == pytest.approx(0.5, abs=0.02)
    assert result["coefficient"] == pytest.approx(math.gamma(1.5), rel=0.02)


def test_lfd_builtin_staircase(capsys):
    result = lfd(capsys, "--builtin", "staircase:3", "--at", "0")
    assert result["critical_order"] == pytest.approx(Q3, abs=0.03)
    assert result["coefficient"] is None

    gap = lfd(capsys, "--builtin", "staircase:3", "--at", "0.5", "--q", str(Q3))
    assert gap["locally_constant"] is True
    assert gap["coefficient"] == 0.0


def test_lfd_input_csv(capsys, tmp_path):
    path = tmp_path / "samples.csv"
    path.write_text("x,f\n" + "".join(f"{i / 100!r},{(i / 100) ** 2!r}\n" for i in range(101)))
    result = lfd(capsys, "--input", str(path), "--at", "0.5", "--q", "0.6", "--ladder", "1e-3", "0.5", "10")
    assert result["critical_order"] == pytest.approx(1.0, abs=1e-6)
    assert result["metadata"]["interpolation"] == "linear"


def test_lfd_errors(capsys, tmp_path):
    unsorted = tmp_path / "unsorted.csv"
    unsorted.write_text("0,1\n2,3\n1,2\n")
    code, _, err = run(capsys, "lfd", "--input", str(unsorted), "--at", "0.5")
    assert code == EXIT_INPUT
    assert "increasing" in err

    malformed = tmp_path / "malformed.csv"
    malformed.write_text("0,1\n1,x\n")
    assert run(capsys, "lfd", "--input", str(malformed), "--at", "0.5")[0] == EXIT_INPUT

    assert run(capsys, "lfd", "--at", "0")[0] == EXIT_INPUT
    assert run(capsys, "lfd", "--builtin", "cosh:1", "--at", "0")[0] == EXIT_INPUT
    assert run(capsys, "lfd", "--builtin", "power:0.5", "--at", "0", "--q", "1.5")[0] == EXIT_INPUT


# }}}


# {{{ determinism


def test_out_and_manifest_files(capsys, tmp_path):
    out = tmp_path / "cover.csv"
    manifest = tmp_path / "manifest.json"
    code, stdout, _ = run(capsys, "set", "--depth", "3", "--out", str(out), "--manifest", str(manifest))
    assert code == 0 and stdout == ""
    data = json.loads(manifest.read_text())
    assert data["command"] == "set"
    assert data["parameters"]["depth"] == 3
    assert data["checksum"] == hashlib.sha256(out.read_bytes()).hexdigest()


def test_module_entry_point_is_deterministic(tmp_path):
    argv = [sys.executable, "-m", "fractalcalc", "staircase", "--grid", "51"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second
    assert first.startswith(b"x,P\n0.0,0.0\n")


# }}}
