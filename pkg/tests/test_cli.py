from __future__ import annotations

import json

import jsonschema

from toricstab.cli import PROBLEM_SCHEMA, ProblemFile, main


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main([*argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_good_fan(capsys, problems_dir):
    code, out, err = run(capsys, "validate", str(problems_dir / "p2.json"), "--jobs", "1")
    assert code == 0
    assert "complete" in out and "True" in out
    assert err == ""


def test_validate_bad_fan_exit_2(capsys, problems_dir):
    code, out, err = run(capsys, "validate", str(problems_dir / "bad_fan.json"), "--jobs", "1")
    assert code == 2
    assert "not complete" in err
    payload = json.loads(err)
    assert payload["error"] == "validation"


def test_validate_schema_violation(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"fan": {"rays": [[1, 0]], "cones": [[0]]}}))
    code, _out, err = run(capsys, "validate", str(bad), "--jobs", "1")
    assert code == 2
    assert "schema" in err


def test_unknown_divisor_exit_2(capsys, problems_dir):
    code, _out, err = run(
        capsys, "curve", str(problems_dir / "p2.json"),
        "--direction", "nope", "--jobs", "1",
    )
    assert code == 2
    assert "unknown divisor" in err


def test_volume_value(capsys, problems_dir):
    code, out, _err = run(
        capsys, "volume", str(problems_dir / "p2.json"), "--jobs", "1"
    )
    assert code == 0
    assert "9" in out


def test_volume_curve_csv(capsys, problems_dir):
    code, out, _err = run(
        capsys, "volume", str(problems_dir / "f1.json"),
        "--curve", "E", "--format", "csv", "--jobs", "1",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,volume,decimal"
    assert lines[1].startswith("0,8,")


def test_delta_table(capsys, problems_dir):
    code, out, _err = run(
        capsys, "delta", str(problems_dir / "f1.json"), "--radius", "2", "--jobs", "1"
    )
    assert code == 0
    assert out.splitlines()[0] == "delta = 6/7 (exact) at u=(1, 1)"


def test_delta_json_roundtrip(capsys, problems_dir):
    code, out, _err = run(
        capsys, "delta", str(problems_dir / "p2.json"),
        "--radius", "2", "--format", "json", "--jobs", "1",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["delta"] == "1"
    # every rational in the payload parses back exactly
    for row in payload["candidates"]:
        from fractions import Fraction

        Fraction(row["quotient"])


def test_curve_functionals(capsys, problems_dir):
    code, out, _err = run(
        capsys, "curve", str(problems_dir / "p2.json"),
        "--direction", "H", "--functionals", "E,Jt,Ent", "--jobs", "1",
    )
    assert code == 0
    lines = out.splitlines()
    assert any(line.startswith("E ") and " 1 " in line for line in lines)
    assert any(line.startswith("Jt") for line in lines)
    assert any(line.startswith("Ent") for line in lines)


def test_curve_all_functionals_json(capsys, problems_dir):
    code, out, _err = run(
        capsys, "curve", str(problems_dir / "p2.json"),
        "--direction", "H", "--format", "json", "--jobs", "1",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["energy"] == "1"
    assert payload["omega_energy"] == "3/2"
    assert payload["jtilde"] == "1"
    assert payload["entropy"] == "1"
    assert payload["ricci_energy"] == "-3"
    assert payload["twisted_mabuchi"] == "-2"


def test_dh_json_and_plot(capsys, tmp_path, problems_dir):
    svg = tmp_path / "dh.svg"
    code, out, _err = run(
        capsys, "dh", str(problems_dir / "p2.json"),
        "--u", "1,0", "--format", "json", "--plot", str(svg), "--jobs", "1",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["energy"] == "1"
    assert payload["measure"]["density"]["pieces"] == [["2/3", "-2/9"]]
    text = svg.read_text()
    assert text.startswith("<svg") and "polyline" in text


def test_report_command(capsys, problems_dir):
    code, out, _err = run(
        capsys, "report", str(problems_dir / "f1.json"),
        "--directions", "E,EplusF", "--radius", "2", "--jobs", "1",
    )
    assert code == 0
    assert "PASS" in out and "FAIL" not in out


def test_byte_identical_output(capsys, problems_dir):
    _code, first, _ = run(
        capsys, "report", str(problems_dir / "f1.json"),
        "--directions", "E,half_E", "--radius", "2", "--format", "json", "--jobs", "1",
    )
    _code, second, _ = run(
        capsys, "report", str(problems_dir / "f1.json"),
        "--directions", "E,half_E", "--radius", "2", "--format", "json", "--jobs", "1",
    )
    assert first == second


def test_computation_error_exit_3(tmp_path, capsys):
    spec = {
        "fan": {"rays": [[1, 0], [0, 1], [-1, -1]], "cones": [[0, 1], [1, 2], [2, 0]]},
        "polarization": "anticanonical",
        "divisors": {"Z": {"coeffs": [0, 0, 0]}},
    }
    path = tmp_path / "zero.json"
    path.write_text(json.dumps(spec))
    code, _out, err = run(capsys, "curve", str(path), "--direction", "Z", "--jobs", "1")
    assert code == 3
    assert json.loads(err)["error"] == "ZeroDivisor"


def test_problem_files_match_schema(problems_dir):
    for name in ("p2.json", "f1.json", "p1xp1.json", "bad_fan.json"):
        with open(problems_dir / name, "r", encoding="utf-8") as fh:
            jsonschema.validate(json.load(fh), PROBLEM_SCHEMA)


def test_refinements_are_applied(tmp_path, capsys):
    spec = {
        "fan": {"rays": [[1, 0], [0, 1], [-1, -1]], "cones": [[0, 1], [1, 2], [2, 0]]},
        "polarization": "anticanonical",
        "divisors": {"H": {"coeffs": [1, 0, 0]}},
        "refinements": [[1, 1]],
    }
    path = tmp_path / "refined.json"
    path.write_text(json.dumps(spec))
    problem = ProblemFile.load(str(path))
    assert len(problem.fan.rays) == 4
    assert problem.polarization.coeffs == (1, 1, 1, 2)
    assert problem.k_rel.coeffs == (0, 0, 0, 1)
    # functionals computed on the refined model agree with the base model
    code, out, _err = run(
        capsys, "curve", str(path), "--direction", "H",
        "--functionals", "E,Jt,Ent", "--format", "json", "--jobs", "1",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["energy"] == "1" and payload["jtilde"] == "1" and payload["entropy"] == "1"


def test_rational_coefficients_parse(capsys, problems_dir):
    code, out, _err = run(
        capsys, "curve", str(problems_dir / "f1.json"),
        "--direction", "half_E", "--functionals", "E", "--format", "json", "--jobs", "1",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["tau_plus"] == "4"
