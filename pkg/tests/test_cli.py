import json
import os
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from prb.arith import GaussianRational, Poly
from prb.cli import main
from prb.errors import ParseError
from prb.parse import parse_gaussian, parse_number, parse_poly, parse_problem

from conftest import EX1A, INVOLUTIONS, PROBLEMS, n, z


def test_parse_poly():
    assert parse_poly("-(n+2)") == -(n + 2)
    assert parse_poly("(n+1)^3 - n/2") == (n + 1) ** 3 - n / 2
    assert parse_poly("3/4") == Poly([Fraction(3, 4)], "n")
    assert parse_poly("1-34*z+z^2", "z") == 1 - 34 * z + z ** 2
    assert parse_poly(" 2 * ( n - 1 ) ^ 2 ") == 2 * (n - 1) ** 2


@pytest.mark.parametrize("text,col", [("n/2+", 4), ("n/(n+1)", 3), ("(n+1", 5), ("n+m", 3),
                                      ("2^n", 3), ("n$", 2), ("", 1), ("n/0", 3)])
def test_parse_errors(text, col):
    with pytest.raises(ParseError) as e:
        parse_poly(text)
    assert e.value.column == col


def test_parse_gaussian_and_numbers():
    assert parse_gaussian("1/2+3/4*i") == GaussianRational(Fraction(1, 2), Fraction(3, 4))
    assert parse_gaussian("-2/3*i") == GaussianRational(Fraction(0), Fraction(-2, 3))
    assert parse_gaussian("5") == GaussianRational(Fraction(5))
    assert parse_number("1e-100") == Fraction(1, 10 ** 100)
    assert parse_number("0.25") == Fraction(1, 4)
    with pytest.raises(ParseError):
        parse_number("one")


def test_parse_problem_examples():
    spec = parse_problem((PROBLEMS / "ex1a.json").read_text())
    assert spec.recurrence == EX1A and spec.initial_are_bounds
    assert spec.initial == [Fraction(1, 5)] * 3
    spec = parse_problem('{"coefficients":["-(n+1)","-1","1"],"initial":["1","1"]}')
    assert spec.recurrence == INVOLUTIONS
    with pytest.raises(ParseError) as e:
        parse_problem('{"coefficients": [\n  "n",, ]}')
    assert e.value.line == 2
    with pytest.raises(ParseError):
        parse_problem('{"coefficients":["n/(n+1)","1"],"initial":["1"]}')


def _run(*args, env=None):
    e = dict(os.environ)
    e.pop("PRB_PRECISION", None)
    e.update(env or {})
    return subprocess.run([sys.executable, "-m", "prb.cli", *args], capture_output=True, text=True, env=e)


def test_bound_rec_round_trip(capsys):
    assert main(["bound-rec", "-i", str(PROBLEMS / "apery.json")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert parse_poly(out["p_alpha"], "z") == 1 - 34 * z + z ** 2
    assert Fraction(out["kappa"]["p"], out["kappa"]["q"]) == 0
    assert abs(float(out["alpha_upper"]) - 33.9706) < 1e-4
    assert float.fromhex(out["alpha_upper_hex"]) >= 33.97056274847714
    assert out["T"] == 0


def test_deterministic_output():
    a = _run("bound-rec", "-i", str(PROBLEMS / "chudnovsky.json"))
    b = _run("bound-rec", "-i", str(PROBLEMS / "chudnovsky.json"))
    assert a.returncode == 0 and a.stdout == b.stdout


def test_precision_env_overrides_flag():
    a = _run("bound-rec", "-i", str(PROBLEMS / "apery.json"), "--precision", "64")
    b = _run("bound-rec", "-i", str(PROBLEMS / "apery.json"), "--precision", "64",
             env={"PRB_PRECISION": "256"})
    c = _run("bound-rec", "-i", str(PROBLEMS / "apery.json"), "--precision", "256")
    assert b.stdout == c.stdout
    assert json.loads(a.stdout)["T"] == json.loads(b.stdout)["T"]


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"coefficients":["n/2+","1"],"initial":["1"]}')
    assert main(["bound-rec", "-i", str(bad)]) == 2
    err = json.loads(capsys.readouterr().out)
    assert err["error"] == "parse_error" and err["column"] == 4
    sing = tmp_path / "sing.json"
    sing.write_text('{"coefficients":["1","n-2"],"initial":["1"]}')
    assert main(["bound-rec", "-i", str(sing)]) == 1
    assert "n = 2" in capsys.readouterr().err
    assert main(["tail", "-i", str(PROBLEMS / "involutions.json"), "--point", "1/2"]) == 1
    assert "divergent" in capsys.readouterr().err
    assert main(["bound-rec", "-i", str(tmp_path / "missing.json")]) == 2


def test_subcommands(capsys):
    assert main(["truncation-order", "-i", str(PROBLEMS / "si.json"), "--point", "1", "--eps", "1e-100"]) == 0
    N = json.loads(capsys.readouterr().out)["N"]
    assert 68 <= N <= 120
    assert main(["check", "-i", str(PROBLEMS / "involutions.json"), "--upto", "300"]) == 0
    assert json.loads(capsys.readouterr().out)["violations"] == []
    assert main(["bound-ratfun", "--num", "1", "--den", "1-z", "--palpha", "1-z", "-m", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["M"]["decimal"] == "1"
    assert main(["tail", "-i", str(PROBLEMS / "cos.json"), "--point", "1", "--from", "10"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["regime"] in ("LARGE_N", "SMALL_N") and float(out["bound"]["decimal"]) > 0
    assert main(["bound-rec", "-i", str(PROBLEMS / "involutions.json"), "--format", "latex"]) == 0
    assert "n!^{1/2}" in capsys.readouterr().out
