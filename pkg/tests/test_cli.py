import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qclab import cli, spectra
from qclab.beltrami import ComplexGrid
from qclab.burkholder import PowerMapProfile, burkholder_integral, solve_beta
from qclab.errors import InvalidParameters


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text, newline="")))


@given(st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e300))
def test_complex_format_round_trip(z):
    assert cli.parse_complex(cli.fmt_complex(z)) == z


@given(st.floats(allow_nan=False))
def test_real_format_round_trip(x):
    assert float(cli.fmt_real(x)) == x


def test_parse_helpers():
    assert cli.parse_complex("1.5-2i") == 1.5 - 2j
    assert cli.parse_complex("3") == 3
    assert cli.parse_complex("-inf+0i").real == -math.inf
    assert cli.parse_range("0.5:2:0.01")[-1] == 2.0
    assert len(cli.parse_range("0.5:2:0.01")) == 151
    for bad in ("1:0:1", "1:2", "a:b:c"):
        with pytest.raises(InvalidParameters):
            cli.parse_range(bad)
    with pytest.raises(InvalidParameters):
        cli.parse_complex("1+2k")


def test_spectrum_example(capsys):
    code, out, _ = run(["spectrum", "--K", "2", "--alpha-grid", "0.5:2:0.01", "--gamma", "0.5"], capsys)
    assert code == 0
    assert "\r\n" in out
    rows = rows_of(out)
    assert len(rows) == 151
    spot = [r for r in rows if float(r["alpha"]) == 1.0][0]
    assert float(spot["value"]) == pytest.approx(2 - math.sqrt(2), abs=1e-12)
    # round trip at 17 significant digits: exactly the library value
    for r in rows[::10]:
        assert float(r["value"]) == spectra.joint_spectrum(2, float(r["alpha"]), 0.5)
    assert all(r["provenance"] for r in rows)


def test_cantor_example(capsys):
    code, out, _ = run(["cantor", "--K", "2", "--alpha", "1", "--gamma", "0.5", "--r", "1e-3",
                        "--depth", "3", "--boxcount", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["t"] == pytest.approx(math.sqrt(2) / 2, abs=1e-14)
    assert doc["N"] == 9
    assert [r["count"] for r in doc["rows"]] == [9, 81, 729]
    assert doc["parameters"]["depth"] == 3


def test_solve_example(tmp_path, capsys):
    gpath = tmp_path / "f.qcgrid"
    code, out, _ = run(["solve", "--mu", "radial", "--tau", "2", "--grid", "256", "--tol", "1e-10",
                        "--grid-out", str(gpath)], capsys)
    assert code == 0
    row = rows_of(out)[0]
    assert float(row["residual"]) <= 1e-10
    assert float(row["rel_l2_error"]) <= 0.02
    g = ComplexGrid.read(gpath)
    assert g.nx == 256 and g.at(0.5) == pytest.approx(0.5 * 0.5, abs=0.01)


def test_burkholder_round_trip(capsys):
    code, out, _ = run(["burkholder", "--K", "2", "--p", "2.5+1i"], capsys)
    assert code == 0
    row = rows_of(out)[0]
    prof = PowerMapProfile.extremal(2.5 + 1j, 1 / 3)
    assert float(row["integral"]) == burkholder_integral(prof, 2.5 + 1j, solve_beta(2.5 + 1j))
    assert cli.parse_complex(row["beta"]) == solve_beta(2.5 + 1j)


def test_powint_divergent_json(capsys):
    code, out, _ = run(["powint", "--tau", "0.5", "--beta", "4", "--format", "json"], capsys)
    assert code == 0
    assert "NaN" not in out and "Infinity" not in out
    row = json.loads(out)["rows"][0]
    assert row["divergent"] == "divergent" and row["average"] == "inf"


def test_interp_spiral(capsys):
    code, out, _ = run(["interp", "--family", "spiral", "--lam", "0.5", "--sample", "4",
                        "--where", "beyond-axis", "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["violations"] >= 1


def test_exponents_spiral(capsys):
    code, out, _ = run(["exponents", "--map", "spiral", "--gamma", "0.5", "--radii", "0.1,0.01"], capsys)
    assert code == 0
    for r in rows_of(out):
        assert float(r["alpha_r"]) == pytest.approx(1, abs=1e-12)
        assert float(r["gamma_r"]) == pytest.approx(0.5, abs=1e-12)


def test_branch_and_bounds(capsys):
    code, out, _ = run(["branch", "--map", "identity", "--path", "2,1+1i,-1"], capsys)
    assert code == 0 and all(abs(cli.parse_complex(r["logval"])) <= 1e-15 for r in rows_of(out))
    code, out, _ = run(["bounds", "--kind", "qc-exp-threshold", "--param", "2"], capsys)
    assert code == 0 and float(rows_of(out)[0]["value"]) == pytest.approx(8 / 3, abs=1e-15)


def test_boxcount_points_file(tmp_path, capsys, rng):
    pts = rng.uniform(0, 1, 5000) + 1j * rng.uniform(0, 1, 5000)
    p = tmp_path / "pts.csv"
    p.write_text("re,im\n" + "".join(f"{float(z.real)!r},{float(z.imag)!r}\n" for z in pts))
    code, out, _ = run(["boxcount", "--points", str(p), "--scales", "0.125,0.0625,0.03125",
                        "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["fit"] == pytest.approx(2, abs=0.1)


def test_deterministic_output(tmp_path, capsys):
    argv = ["interp", "--family", "radial", "--lam", "0.5", "--sample", "5", "--seed", "7"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(argv + ["-o", str(a)]) == 0
    assert cli.main(argv + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().count(b"\r\n") == 6


def test_exit_invalid(capsys):
    code, _, err = run(["spectrum", "--K", "2"], capsys)
    assert code == 2 and json.loads(err)["exit"] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["spectrum", "--bogus", "1"])
    assert exc.value.code == 2
    assert json.loads(capsys.readouterr().err)["error"] == "invalid-config"
    code, _, err = run(["spectrum", "--K", "two", "--alpha", "1", "--gamma", "0"], capsys)
    assert code == 2


def test_exit_numerical(capsys):
    code, _, err = run(["burkholder", "--K", "2", "--p", "1.5"], capsys)
    assert code == 3
    assert json.loads(err)["error"] == "infeasible-params"


def test_unknown_key_rejected(capsys):
    assert cli.run(cli.RunConfig("spectrum", {"K": "2", "colour": "red"})) == 2
    assert "colour" in capsys.readouterr().err


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "qclab", "bounds", "--kind", "qc-alpha-range",
                        "--param", "3"], capture_output=True, text=True)
    assert p.returncode == 0
    rows = list(csv.DictReader(io.StringIO(p.stdout)))
    assert float(rows[0]["low"]) == pytest.approx(1 / 3) and float(rows[0]["high"]) == 3
