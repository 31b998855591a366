import json
import subprocess
import sys

import pytest

from padhg.cli import main


def run_cli(*args):
    proc = subprocess.run([sys.executable, "-m", "padhg.cli", *args],
                          capture_output=True, text=True)
    return proc


def test_gamma_verb(capsys):
    assert main(["gamma", "--z", "1", "--p", "7", "--prec", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"]["unit"] == [6, 6, 6, 6]      # -1 mod 7^4
    assert out["source"] and out["certified_prec"] == 4


def test_polygamma_verb_matches_worked_value(capsys):
    assert main(["polygamma", "--r", "0", "--z", "1/4", "--p", "5",
                 "--prec", "6", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    from fractions import Fraction
    from padhg.padics import PAdicNumber, iwasawa_log
    u = PAdicNumber.from_rational(Fraction(8) ** 4, 5, 8)
    expect = iwasawa_log(u) * Fraction(-1, 5)
    got = PAdicNumber.from_json(out["value"])
    assert got.agrees(expect, 5)


def test_verify_intertwiner_exit_code(capsys):
    rc = main(["verify-intertwiner", "--a", "1/3,2/3", "--b", "1,1",
               "--p", "5", "--prec", "8", "--terms", "24"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["certified_zero"] and out["m_eff"] >= 4


def test_math_error_exit_code(capsys):
    rc = main(["zeta", "--r", "1", "--p", "7"])
    assert rc == 1
    out = json.loads(capsys.readouterr().out)
    assert out["error"] == "r-is-one"


def test_usage_error_exit_code():
    proc = run_cli("gamma", "--z", "not-a-rational", "--p", "7")
    assert proc.returncode == 2


def test_dwork_and_legendre_verbs(capsys):
    assert main(["dwork", "--n", "4", "--d", "5", "--w", "1,1,1,1,1",
                 "--p", "7"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["a_cancelled"] == ["1/5", "2/5", "3/5", "4/5"]
    assert out["epsilon_order"] == 20
    assert main(["legendre", "--lambda0", "3", "--p", "7", "--json"]) == 0
    out2 = json.loads(capsys.readouterr().out)
    assert out2["a_p"] == 4


def test_selftest_deterministic():
    a = run_cli("selftest", "--seed", "3", "--json")
    b = run_cli("selftest", "--seed", "3", "--json")
    assert a.returncode == 0 and a.stdout == b.stdout


def test_hg_series_verb(capsys):
    assert main(["hg-series", "--a", "1/2,1/2", "--b", "1,1",
                 "--terms", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["coeffs"][:2] == ["1", "1/4"]


def test_lvalue_and_inverse_verbs(capsys):
    assert main(["lvalue", "--r", "1", "--modulus", "4", "--char-index", "1",
                 "--p", "5", "--prec", "5"]) == 0
    capsys.readouterr()
    assert main(["polygamma-inverse", "--r", "1", "--k", "1",
                 "--modulus", "4", "--p", "5", "--prec", "5"]) == 0
    capsys.readouterr()


def test_syntomic_verb(capsys):
    assert main(["syntomic", "--a", "1/4,3/4", "--b", "1,1", "--p", "5",
                 "--c", "6", "--prec", "5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["coefficients"]) == 2
