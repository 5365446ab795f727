import argparse
import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from hypheat.cli import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_VERIFY,
    RunConfig,
    build_parser,
    config_from_args,
    format_value,
    main,
    parse_grid,
    render,
    run,
)


def invoke(argv):
    """Exit code and captured table of one CLI call."""
    out = io.StringIO()
    code = run(config_from_args(build_parser().parse_args(argv)), out)
    return code, out.getvalue()


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_kernel_example():
    code, text = invoke(["kernel", "--dim", "3", "--t", "1", "--r", "0,1"])
    assert code == EXIT_OK
    rows = csv_rows(text)
    assert [r["method"] for r in rows] == ["closed_form", "closed_form"]
    assert float(rows[0]["value"]) == pytest.approx(0.0082583, abs=1e-7)
    assert float(rows[1]["value"]) == pytest.approx(0.0054727, abs=1e-7)
    assert list(rows[0]) == ["n", "m", "r", "t", "value", "method"]


def test_coeffs_example():
    code, text = invoke(["coeffs", "--dim", "5", "--sector", "scalar"])
    assert code == EXIT_OK
    rows = csv_rows(text)
    b = [Fraction(r["value"]) for r in rows if r["kind"] == "b_tilde"]
    a = [Fraction(r["value"]) for r in rows if r["kind"] == "a"]
    assert b == [1, Fraction(-10, 3), Fraction(32, 3)]
    assert a == [1, Fraction(2, 3)]
    assert "-10/3" in text


def test_u1_and_ghost_coefficients():
    _, text = invoke(["coeffs", "--dim", "3", "--sector", "ghost_subtracted"])
    assert [r["value"] for r in csv_rows(text)] == ["1", "5", "-1/2"]
    _, text = invoke(["coeffs", "--dim", "3", "--sector", "u1"])
    assert [r["value"] for r in csv_rows(text)] == ["3", "3", "1/2"]


def test_csv_and_json_agree():
    args = ["kernel", "--dim", "4", "--t", "0.5,1", "--r", "0:2:3"]
    _, c = invoke(args)
    _, j = invoke(args + ["--format", "json"])
    doc = json.loads(j)
    rows = csv_rows(c)
    assert doc["columns"] == list(rows[0])
    for crow, jrow in zip(rows, doc["rows"]):
        assert crow["value"] == format(jrow["value"], ".17g")
        assert float(crow["value"]) == jrow["value"]


def test_output_is_deterministic_across_jobs():
    args = ["trace", "--dim", "3", "--t", "0.1:2:6", "--sector", "u1"]
    _, one = invoke(args)
    _, again = invoke(args)
    _, threaded = invoke(args + ["--jobs", "4"])
    assert one == again == threaded


def test_fourier_and_action_commands():
    code, text = invoke(["fourier", "--dim", "3", "--lam", "1,2", "--r", "0.5"])
    assert code == EXIT_OK
    rows = csv_rows(text)
    assert float(rows[1]["plancherel_density"]) == 4.0
    code, text = invoke(["action", "--dim", "3", "--cutoff", "1,10"])
    assert code == EXIT_OK
    rows = csv_rows(text)
    tot = float(rows[1]["total"])
    assert tot == pytest.approx(float(rows[1]["divergent"]) + float(rows[1]["regular"]), rel=1e-15)
    code, text = invoke(["action", "--dim", "4", "--cutoff", "3"])
    assert code == EXIT_OK and float(csv_rows(text)[0]["regular_limit"]) != 0


def test_ghost_subtracted_action():
    code, text = invoke(["action", "--dim", "3", "--sector", "ghost_subtracted", "--cutoff", "10"])
    assert code == EXIT_OK
    row = csv_rows(text)[0]
    assert row["regular_limit"] == ""
    assert float(row["total"]) > 0


@pytest.mark.parametrize(
    "argv",
    [
        ["kernel", "--dim", "3", "--t", "1,0.5", "--r", "0"],
        ["kernel", "--dim", "3", "--t", "-1", "--r", "0"],
        ["kernel", "--dim", "3", "--r", "0"],
        ["trace", "--dim", "4", "--t", "1", "--sector", "u1"],
        ["coeffs", "--dim", "1"],
        ["kernel", "--dim", "3", "--t", "1", "--r", "0", "--mass", "-1"],
        ["action", "--dim", "5", "--sector", "u1", "--cutoff", "2"],
        ["kernel", "--dim", "3", "--t", "1", "--r", "0", "--jobs", "0"],
    ],
)
def test_config_errors(argv):
    assert invoke(argv)[0] == EXIT_CONFIG


def test_numeric_failure_exit_code():
    # the spectral route to Q refuses large times
    assert invoke(["trace", "--dim", "5", "--sector", "u1", "--t", "30"])[0] == EXIT_NUMERIC


def test_verify_exit_codes():
    code, text = invoke(["verify", "--check", "4", "--check", "5"])
    assert code == EXIT_OK
    assert [r["passed"] for r in csv_rows(text)] == ["true", "true"]
    code, _ = invoke(["verify", "--check", "8"])
    assert code == EXIT_VERIFY


def test_grid_parsing_and_formatting():
    assert parse_grid("1,2, 3") == (1.0, 2.0, 3.0)
    assert parse_grid("0:1:3") == (0.0, 0.5, 1.0)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_grid("a,b")
    assert format_value(Fraction(-1, 2)) == "-1/2"
    assert format_value(Fraction(4)) == "4"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(True) == "true" and format_value(None) is None
    assert render(["x"], [(1.5,)], "csv") == "x\n1.5\n"
    assert json.loads(render(["x", "y"], [(Fraction(1, 3), None)], "json"))["rows"] == [{"x": "1/3", "y": None}]
    with pytest.raises(ValueError):
        RunConfig("plot").validate()


def test_main_writes_file(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["kernel", "--dim", "1", "--t", "1", "--r", "0", "-o", str(out)]) == EXIT_OK
    assert out.read_text(encoding="utf-8").startswith("n,m,r,t,value,method\n")


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hypheat.cli", "coeffs", "--dim", "3", "--format", "json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == EXIT_OK
    assert json.loads(proc.stdout)["columns"][0] == "n"
