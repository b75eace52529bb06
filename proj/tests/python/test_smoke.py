import json
import os
import subprocess
from fractions import Fraction

import jsonschema
import pytest

CLI = os.environ.get("LATFLOW_CLI", "latflow")
SCHEMA = os.environ.get("LATFLOW_SCHEMA", os.path.join(os.path.dirname(__file__), "../../schema/report.schema.json"))

COMMANDS = {
    "classify": ["classify", "liouville:4", "liouville:4", "--q-max", "2000000"],
    "orbit": ["orbit", "1/2", "1/3", "--t-grid", "0:4:1", "--N", "10"],
    "density": ["density", "1/2", "1/3", "--R", "2", "--T", "8", "--q-max", "100"],
    "equidist": ["equidist", "sqrt2", "sqrt3", "--t-list", "1,2", "--N", "20", "--radii", "1"],
    "dirichlet": ["dirichlet", "sqrt2", "sqrt3", "--s", "0.25", "--delta", "0.6", "--t-max", "3"],
}


@pytest.fixture(scope="module")
def validator():
    with open(SCHEMA) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def run_cli(args):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True, timeout=600)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


@pytest.mark.parametrize("command", sorted(COMMANDS))
def test_report_matches_schema(validator, command):
    report = run_cli(COMMANDS[command])
    validator.validate(report)
    assert report["command"] == command


def test_csv_and_json_files(tmp_path, validator):
    prefix = str(tmp_path / "orbit")
    proc = subprocess.run([CLI, *COMMANDS["orbit"], "--out", prefix, "--format", "both"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    with open(prefix + ".json") as f:
        validator.validate(json.load(f))
    with open(prefix + ".csv") as f:
        header = f.readline().strip().split(",")
    assert header[0] == "t"


def test_usage_error_exit_code():
    proc = subprocess.run([CLI, "classify", "1/2"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_module():
    latflow = pytest.importorskip("latflow")
    p1, p2, r1, r2 = latflow.nearest_residuals("1/2", "1/3", 6)
    assert (p1, p2, r1, r2) == (-2, -3, Fraction(0), Fraction(0))
    assert latflow.rational_certificate("1/2", "1/3") == (2, 3, 6)
    assert latflow.rational_certificate("sqrt2", "sqrt3") is None
    witnesses = latflow.w2_witness_search("1/2", "1/3", "1/1000", 60)
    assert [w["q"] for w in witnesses] == [6, 12, 18, 24, 30, 36, 42, 48, 54, 60]
    vec, value = latflow.segment_minimum("1/2", "1/3", "0", "1", 2.0, "3")
    assert value == pytest.approx(6 * 2.718281828459045**-2.0, rel=1e-12)
    assert vec in [(-2, -3, 6), (2, 3, -6)]
    _, lam = latflow.shortest_vector([[2, 0, 0], [0, 3, 0], [0, 0, 5]])
    assert lam == 2
    report = latflow.run(run_cli(COMMANDS["orbit"])["config"])
    assert report["results"]["rows"][0]["min_value"] == 1
