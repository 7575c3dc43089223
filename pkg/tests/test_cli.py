import json
import subprocess
import sys

import pytest

import dyadic_hilbert.symbol as sym
from dyadic_hilbert.cli import ParseError, main, parse_element
from dyadic_hilbert.knfield import kn_ctx
from dyadic_hilbert.scaled import PrecisionError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def k2():
    return kn_ctx(2, 3, 19)


def test_parse_element(k2):
    t, w = k2.pibar(), k2.w()
    assert parse_element("1 + t", k2) == 1 + t
    assert parse_element("5", k2) == k2.const(5)
    assert parse_element("1 + 2*w*t + t^3", k2) == 1 + w * t * 2 + t ** 3
    assert parse_element("(1+t)^8", k2) == k2.one()
    assert parse_element("-3 - t*(w - 1)", k2) == k2.const(-3) - t * (w - 1)


@pytest.mark.parametrize("src,pos", [("1 +", 3), ("1 + x", 4), ("(1+t", 4), ("t^w", 2), ("t t", 2), ("", 0)])
def test_parse_errors_have_positions(k2, src, pos):
    with pytest.raises(ParseError) as exc:
        parse_element(src, k2)
    assert exc.value.pos == pos


def test_w_needs_d_above_one():
    with pytest.raises(ParseError, match="d > 1"):
        parse_element("1 + w", kn_ctx(1, 2, 18))


def test_symbol_json_schema(capsys):
    code, out, _ = run(capsys, "symbol", "--d", "1", "--n", "2", "--x", "5", "--y", "1+t", "--emit", "json")
    assert code == 0
    data = json.loads(out)
    assert set(data) >= {"symbol", "modulus", "n", "d", "guard_consumed", "paths_agreed", "seed"}
    assert data["modulus"] == 4 and data["symbol"] == 2 and data["paths_agreed"] is None


def test_symbol_both_paths(capsys):
    code, out, _ = run(capsys, "symbol", "--d", "2", "--n", "3", "--x", "1+t+w*t^2", "--y", "5+4*w*t",
                       "--paths", "both", "--emit", "json", "--lift-out")
    assert code == 0
    data = json.loads(out)
    assert data["paths_agreed"] is True and data["symbol"] == data["symbol_cup"]
    assert data["lifts"]["f"]["0"] == [1, 0]


def test_trivial_symbol_text(capsys):
    code, out, _ = run(capsys, "symbol", "--d", "1", "--n", "2", "--x", "1", "--y", "1+t")
    assert code == 0
    assert out.splitlines()[0] == "[x, y] = 0 mod 4"


def test_non_principal_unit_exit_1(capsys):
    code, _, err = run(capsys, "symbol", "--d", "1", "--n", "2", "--x", "t", "--y", "1+t")
    assert code == 1
    assert "not a principal unit (valuation 1)" in err


@pytest.mark.parametrize("argv", [
    ["symbol", "--d", "1", "--n", "2", "--x", "1+(t", "--y", "1"],
    ["symbol", "--d", "1", "--n", "1", "--x", "1", "--y", "1"],
    ["symbol", "--d", "1", "--n", "2", "--x", "1", "--y", "1", "--guard", "3"],
    ["symbol", "--d", "1", "--n", "2", "--x", "1"],
    ["table", "--d", "1", "--n", "2", "--gens", ""],
    ["table", "--d", "1", "--n", "2", "--gens", "5,,1+t"],
    ["selfcheck", "--seed", "-1"],
    [],
])
def test_usage_errors_exit_1(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_disagreement_exit_2(capsys, monkeypatch):
    real = sym.Engine.cup_raw
    monkeypatch.setattr(sym.Engine, "cup_raw", lambda self, X, Y: real(self, X, Y) + 1)
    code, out, err = run(capsys, "symbol", "--d", "1", "--n", "2", "--x", "5", "--y", "1+t",
                         "--paths", "both", "--emit", "json")
    assert code == 2
    assert json.loads(out)["paths_agreed"] is False
    assert "disagree" in err


def test_precision_failure_exit_3(capsys, monkeypatch):
    def boom(*a, **kw):
        raise PrecisionError("guard exhausted")
    monkeypatch.setattr(sym, "_evaluate", boom)
    code, _, err = run(capsys, "symbol", "--d", "1", "--n", "2", "--x", "5", "--y", "1+t")
    assert code == 3
    assert "precision failure" in err


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--d", "1", "--n", "2", "--gens", "5,1+t", "--emit", "json")
    assert code == 0
    T = json.loads(out)["table"]
    assert len(T) == 2 and all((T[i][j] + T[j][i]) % 4 == 0 for i in range(2) for j in range(2))
    code, out, _ = run(capsys, "table", "--d", "1", "--n", "2", "--gens", "1+t")
    assert code == 0 and out.strip() == "1+t |  0"


def test_module_entry_point_selfcheck_is_deterministic():
    cmd = [sys.executable, "-m", "dyadic_hilbert", "selfcheck", "--level", "fast", "--seed", "7"]
    a = subprocess.run(cmd, capture_output=True, text=True)
    b = subprocess.run(cmd, capture_output=True, text=True)
    assert a.returncode == 0, a.stdout + a.stderr
    assert a.stdout == b.stdout
    assert a.stdout.splitlines()[-1].endswith("suites passed")
