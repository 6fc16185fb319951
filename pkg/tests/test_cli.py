"""Tests for the command line interface and the expression parser.

The CLI contract: JSON on stdout by default, deterministic bytes for a
fixed input and seed, exit code 0 for answers, 1 for bad input, 2 for a
numeric failure that survives the whole precision ladder.
"""

import json
import subprocess
import sys

import pytest

from curvefactor.cli import main, parse_function
from curvefactor.errors import NumericFailure, ParseError
from curvefactor.ratfunc import SpherePoint


def ev(f, z):
    """Evaluate a parsed function at a plain complex number."""
    return f(SpherePoint(z)).to_complex()


# ---------------------------------------------------------------------------
# expression parsing
# ---------------------------------------------------------------------------


def test_parse_function_values():
    f = parse_function("z^2")
    assert f.degree == 2
    z = 1.5 + 0.5j
    assert abs(ev(f, z) - z**2) < 1e-12

    g = parse_function("(z^2+1)/z")
    assert abs(ev(g, z) - (z * z + 1) / z) < 1e-12

    h = parse_function("4*z^3 - 3*z")
    assert abs(ev(h, z) - (4 * z**3 - 3 * z)) < 1e-12


def test_parse_function_precedence_and_signs():
    # unary minus binds weaker than the power
    f = parse_function("-z^2")
    assert abs(ev(f, 2) + 4) < 1e-12
    # negative exponents walk into the denominator
    g = parse_function("z^-2")
    assert abs(ev(g, 2) - 0.25) < 1e-12
    assert g.degree == 2


def test_parse_function_gaussian_coefficients():
    f = parse_function("i*z^3 - 3*z")
    assert abs(ev(f, 2) - (8j - 6)) < 1e-12
    g = parse_function("(2+3*i)*z / (z - i)")
    assert abs(ev(g, 1) - (2 + 3j) / (1 - 1j)) < 1e-12
    assert g.exact


def test_parse_function_exactness():
    assert parse_function("z^2/3 + 1/7").exact


def test_parse_errors_carry_offset_and_expectation():
    with pytest.raises(ParseError) as e:
        parse_function("z^^2")
    assert e.value.offset == 2
    assert "integer exponent" in e.value.expected

    with pytest.raises(ParseError) as e:
        parse_function("z^2 + ")
    assert e.value.offset == 6

    with pytest.raises(ParseError) as e:
        parse_function("(z")
    assert e.value.offset == 2
    assert "')'" in e.value.expected

    with pytest.raises(ParseError) as e:
        parse_function("z$")
    assert e.value.offset == 1


def test_parse_rejects_constant_denominator_zero():
    with pytest.raises(Exception):
        parse_function("z / 0")


# ---------------------------------------------------------------------------
# subcommands, in process
# ---------------------------------------------------------------------------


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_analyze_json_schema(capsys):
    code, out = _run(capsys, ["analyze", "--p", "z^2", "--q", "(z^2+1)/z"])
    assert code == 0
    doc = json.loads(out)
    assert sorted(doc.keys()) == [
        "branch",
        "components",
        "criteria",
        "inputs",
        "meta",
        "verdict",
    ]
    assert doc["inputs"] == {"p": "z^2", "q": "(z^2+1)/z"}
    assert doc["components"] == [{"size": 4, "genus": 1, "e_counts": [2, 2, 2, 2]}]
    assert doc["verdict"] == {"solutions": True}
    values = doc["branch"]["values"]
    assert values[0] == {"value": [-2.0, 0.0], "cycle_p": None, "cycle_q": [2]}
    assert values[-1]["value"] == "inf"
    assert doc["meta"]["precision"] == 53
    assert doc["meta"]["seed"] == 0
    crits = {c["id"]: c["conclusion"] for c in doc["criteria"]}
    assert crits["at-most-one-common-critical-value"] == "irreducible"
    assert crits["coprime-degrees"] is None


def test_self_json_lists_diagonal_first(capsys):
    code, out = _run(capsys, ["self", "--p", "z^3 - 3*z"])
    assert code == 0
    doc = json.loads(out)
    comps = [(c["size"], c["genus"]) for c in doc["components"]]
    assert comps == [(3, 0), (6, 0)]
    assert doc["verdict"] == {"solutions": True}


def test_uniqueness_json(capsys):
    code, out = _run(capsys, ["uniqueness", "--p", "z^4 + z"])
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == {"strong_uniqueness": False}

    code, out = _run(capsys, ["uniqueness", "--p", "z^2", "--human"])
    assert code == 0
    assert "NOT a strong uniqueness function" in out


def test_sweep_json(capsys):
    code, out = _run(capsys, ["sweep", "--n", "2", "--m", "2", "--trials", "2"])
    assert code == 0
    doc = json.loads(out)
    assert doc["sweep"]["kind"] == "pair"
    assert doc["sweep"]["successes"] == 2
    assert len(doc["sweep"]["trials"]) == 2
    for t in doc["sweep"]["trials"]:
        assert t["ok"] and t["genera"] == [1]


def test_sweep_uniqueness_flag(capsys):
    code, out = _run(capsys, ["sweep", "--n", "3", "--trials", "1", "--uniqueness"])
    assert code == 0
    doc = json.loads(out)
    assert doc["sweep"]["kind"] == "uniqueness"
    assert doc["sweep"]["successes"] == 0


def test_human_output(capsys):
    code, out = _run(capsys, ["analyze", "--p", "z^2", "--q", "(z^2+1)/z", "--human"])
    assert code == 0
    assert "verdict: non-constant meromorphic solutions" in out
    assert "size    4   genus   1" in out


def test_json_file_flag(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out = _run(
        capsys, ["analyze", "--p", "z^2", "--q", "z^3", "--json", str(target)]
    )
    assert code == 0
    # stdout switches to the readable report when JSON goes to a file
    assert "verdict:" in out
    doc = json.loads(target.read_text())
    # both power maps share exactly the values 0 and infinity
    assert doc["components"] == [{"size": 6, "genus": 0, "e_counts": [1, 1]}]


def test_monodromy_report_and_dump(tmp_path, capsys):
    target = tmp_path / "trace.txt"
    code, out = _run(capsys, ["monodromy", "--p", "z^2", "--dump", str(target)])
    assert code == 0
    assert "basepoint:" in out
    assert "loop 0:" in out
    assert "alpha = (0 1)" in out
    lines = target.read_text().splitlines()
    assert lines
    for line in lines:
        parts = line.split()
        assert len(parts) == 5
        int(parts[0]), float(parts[1]), int(parts[2])
        complex(float(parts[3]), float(parts[4]))
    # parameter starts at zero for the first tracked point
    first = lines[0].split()
    assert first[0] == "0" and float(first[1]) == 0.0


def test_exit_code_bad_expression(capsys):
    code = main(["analyze", "--p", "z^^2", "--q", "z"])
    err = capsys.readouterr().err
    assert code == 1
    assert "offset 2" in err


def test_exit_code_missing_argument(capsys):
    code = main(["analyze", "--p", "z^2"])
    assert code == 1


def test_exit_code_numeric_failure(monkeypatch, capsys):
    import curvefactor.cli as cli_mod

    def boom(args):
        raise NumericFailure("stuck at top precision")

    monkeypatch.setattr(cli_mod, "_run_analyze", boom)
    code = main(["analyze", "--p", "z^2", "--q", "z^3"])
    assert code == 2
    assert "stuck" in capsys.readouterr().err


def test_version_flag(capsys):
    # argparse raises SystemExit(0); main folds that into a clean return
    assert main(["--version"]) == 0
    assert "curvefactor" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# determinism across processes
# ---------------------------------------------------------------------------


def test_output_bytes_are_reproducible():
    cmd = [
        sys.executable,
        "-m",
        "curvefactor",
        "analyze",
        "--p",
        "z^3 - 3*z",
        "--q",
        "(z^2+1)/z",
        "--verify",
        "--seed",
        "3",
    ]
    one = subprocess.run(cmd, capture_output=True, check=True)
    two = subprocess.run(cmd, capture_output=True, check=True)
    assert one.stdout == two.stdout
    assert json.loads(one.stdout)["meta"]["seed"] == 3
