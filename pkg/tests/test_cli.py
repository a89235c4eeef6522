import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from rkcond.cli import EXIT_OVERFLOW, EXIT_SINGULAR, EXIT_USAGE, main
from rkcond.linalg_core import write_matrix
from rkcond.zoo import jordan

REGIME = {
    "type": "object",
    "required": ["kind", "exponent", "has_log", "log_inside_power", "case", "optimal_k"],
    "properties": {
        "kind": {"enum": ["ExpDecay", "Poly", "PolyLog", "Special"]},
        "exponent": {"type": "number"},
        "has_log": {"type": "boolean"},
        "log_inside_power": {"type": "boolean"},
        "case": {"type": "string"},
        "optimal_k": {"type": ["integer", "null"]},
    },
}
FLAGS = {"type": "array", "items": {"type": "string"}}
CASE = {"type": ["string", "null"]}

SCHEMAS = {
    "classify": {
        "type": "object",
        "required": ["command", "case", "powers", "differences", "is_ritt", "optimal_k", "notes", "ledger_flags"],
        "properties": {"case": CASE, "powers": REGIME, "differences": REGIME, "ledger_flags": FLAGS,
                       "is_ritt": {"type": "boolean"}},
    },
    "region": {
        "type": "object",
        "required": ["command", "case", "region", "boundary", "ledger_flags"],
        "properties": {"case": CASE, "ledger_flags": FLAGS,
                       "region": {"type": "object", "required": ["variant", "provenance"]},
                       "boundary": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}}},
    },
    "verify": {
        "type": "object",
        "required": ["command", "case", "c_hat", "argmax", "region", "spectrum_check", "finite_c", "ledger_flags"],
        "properties": {"case": CASE, "ledger_flags": FLAGS, "c_hat": {"type": "number"},
                       "finite_c": {"type": "boolean"}},
    },
    "powers": {
        "type": "object",
        "required": ["command", "case", "report", "fitted_powers", "ledger_flags"],
        "properties": {"case": CASE, "ledger_flags": FLAGS,
                       "fitted_powers": {"anyOf": [REGIME, {"type": "null"}]}},
    },
    "interp": {
        "type": "object",
        "required": ["command", "case", "p", "params", "is_ritt", "ledger_flags"],
        "properties": {"case": CASE, "ledger_flags": FLAGS},
    },
    "figures": {
        "type": "object",
        "required": ["command", "figures"],
        "properties": {"figures": {"type": "array", "items": {
            "type": "object", "required": ["case", "params", "svg", "sha256", "ledger_flags"]}}},
    },
}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMAS[doc["command"]])
    return doc


def test_classify_ritt(capsys):
    doc = run_json(capsys, "classify", "--alpha", "1", "--beta", "0")
    assert doc["powers"]["kind"] == "Poly" and doc["powers"]["exponent"] == 0
    assert doc["case"] == "6" and doc["is_ritt"] is True


def test_classify_kreiss(capsys):
    doc = run_json(capsys, "classify", "--alpha", "0", "--beta", "1")
    assert doc["powers"]["exponent"] == 1 and doc["case"] == "2" and not doc["is_ritt"]


def test_classify_case_422(capsys):
    doc = run_json(capsys, "classify", "--alpha", "0.45", "--beta", "0.8", "--c", "2")
    assert doc["case"] == "4.2.2"
    assert doc["powers"]["exponent"] == pytest.approx(0.6, abs=1e-12)
    assert "j-integral-exponent-2-minus-gamma" in doc["ledger_flags"]
    assert doc["region"]["variant"] == "StolzClosure"


def test_classify_out_of_range(capsys):
    code, _, err = run(capsys, "classify", "--alpha", "9", "--beta", "0")
    assert code == EXIT_USAGE and "alpha" in err


def test_bad_flags_exit_two(capsys):
    assert run(capsys, "classify", "--alpha", "x", "--beta", "0")[0] == EXIT_USAGE
    assert run(capsys, "nonsense")[0] == EXIT_USAGE
    assert run(capsys, "classify", "--beta", "0")[0] == EXIT_USAGE


@pytest.mark.parametrize("alpha,beta,variant", [("0.25", "0.25", "OmegaGap"), ("0.5", "0.5", "StolzClosure"),
                                                ("0.75", "0.5", "StolzClosure")])
def test_region_json(capsys, alpha, beta, variant):
    doc = run_json(capsys, "region", "--alpha", alpha, "--beta", beta, "--c", "2", "--points", "32")
    assert doc["region"]["variant"] == variant and len(doc["boundary"]) == 32


def test_region_csv_and_svg(capsys):
    code, out, _ = run(capsys, "region", "--alpha", "0.5", "--beta", "0.5", "--c", "2",
                       "--points", "16", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "theta,re,im" and len(lines) == 17
    code, out, _ = run(capsys, "region", "--alpha", "0.75", "--beta", "0.5", "--c", "2", "--format", "svg")
    assert code == 0 and "<svg" in out


def test_region_points_minimum(capsys):
    assert run(capsys, "region", "--alpha", "0.5", "--beta", "0.5", "--points", "8")[0] == EXIT_USAGE


def test_region_trivial_warning(capsys):
    code, out, err = run(capsys, "region", "--alpha", "0.5", "--beta", "1.5", "--points", "16")
    assert code == 0 and "warning" in err
    assert json.loads(out)["region"]["variant"] == "ClosedUnitDisk"


def test_verify_zero_matrix(capsys, tmp_path):
    path = tmp_path / "zero.json"
    write_matrix(path, np.zeros((1, 1)))
    doc = run_json(capsys, "verify", str(path), "--alpha", "0", "--beta", "0")
    assert doc["c_hat"] == pytest.approx(1, abs=1e-3)
    assert doc["region"]["variant"] == "OmegaGap"
    assert doc["spectrum_check"]["ok"] and doc["finite_c"]


def test_verify_stolz_preset(capsys):
    doc = run_json(capsys, "verify", "--preset", "stolz", "--alpha", "0.5", "--beta", "0.5",
                   "--no-probe", "--threads", "2")
    assert doc["region"]["variant"] == "StolzClosure" and doc["spectrum_check"]["ok"]


def test_verify_jordan_diverges(capsys):
    doc = run_json(capsys, "verify", "--preset", "jordan", "--alpha", "1", "--beta", "0")
    assert not doc["finite_c"]
    assert "no finite C at tested resolution" in doc["notes"]


def test_verify_singular_grid_node(capsys, tmp_path):
    path = tmp_path / "m.json"
    write_matrix(path, np.diag([2.0]))
    code, _, err = run(capsys, "verify", str(path), "--alpha", "0", "--beta", "1", "--radii", "1",
                       "--min-offset", "1", "--max-offset", "1", "--angles", "4")
    assert code == EXIT_SINGULAR and "spectrum" in err


def test_verify_parse_error(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 2, "entries": [[1, 0]]}')
    assert run(capsys, "verify", str(path), "--alpha", "0", "--beta", "1")[0] == EXIT_USAGE
    assert run(capsys, "verify", "--alpha", "0", "--beta", "1")[0] == EXIT_USAGE


def test_verify_non_triangular_without_spectrum(capsys, tmp_path):
    path = tmp_path / "m.json"
    write_matrix(path, [[0.1, 0.2], [0.3, 0.1]])
    doc = run_json(capsys, "verify", str(path), "--alpha", "0.5", "--beta", "0.5", "--no-probe")
    assert doc["spectrum_check"] is None


def test_powers_diag_exp_decay(capsys):
    doc = run_json(capsys, "powers", "--preset", "diag", "--preset-arg", "points=0.5", "--n-max", "100")
    assert doc["fitted_powers"]["kind"] == "ExpDecay"


def test_powers_jordan_slope(capsys):
    doc = run_json(capsys, "powers", "--preset", "jordan", "--n-max", "1000", "--alpha", "0", "--beta", "1")
    assert doc["report"]["fitted_power_slope"] == pytest.approx(1, abs=0.05)
    assert doc["verdict"] == "consistent" and doc["case"] == "2"
    assert all(r["power_error"] < 1e-8 for r in doc["contour_crosscheck"])


def test_powers_out_dir(capsys, tmp_path):
    code, out, _ = run(capsys, "powers", "--preset", "cesaro-witness", "--n-max", "200",
                       "--out-dir", str(tmp_path), "--format", "csv")
    assert code == 0 and out.startswith("n,power_norm,diff_norm\n")
    assert {p.name for p in tmp_path.iterdir()} == {"norms.csv", "summary.json", "norms.svg"}
    jsonschema.validate(json.loads((tmp_path / "summary.json").read_text()), SCHEMAS["powers"])


def test_powers_overflow_exit_four(capsys, tmp_path):
    path = tmp_path / "big.json"
    write_matrix(path, np.diag([3.0]))
    code, out, err = run(capsys, "powers", str(path), "--n-max", "1000", "--format", "csv")
    assert code == EXIT_OVERFLOW and "overflow" in err
    assert len(out.splitlines()) > 600  # partial sequence retained


@pytest.mark.parametrize("c0,c1,theta,p,c", [("2", "2", "0.5", 2.0, 2.0), ("1", "1", "0.3", None, 1.0),
                                             ("4", "9", "0.5", 2.0, 6.0)])
def test_interp(capsys, c0, c1, theta, p, c):
    doc = run_json(capsys, "interp", "--c0", c0, "--p0", "1", "--c1", c1, "--p1", "inf", "--theta", theta)
    assert doc["params"]["c"] == pytest.approx(c)
    assert doc["is_ritt"] is True
    if p is not None:
        assert doc["p"] == pytest.approx(p)


def test_interp_bad_theta(capsys):
    assert run(capsys, "interp", "--c0", "1", "--p0", "1", "--c1", "1", "--p1", "2", "--theta", "1.5")[0] == EXIT_USAGE


def test_figures(capsys, tmp_path):
    doc = run_json(capsys, "figures", "--case", "3", "--out-dir", str(tmp_path))
    assert [f["case"] for f in doc["figures"]] == [3]
    svg = (tmp_path / "figure_case3.svg").read_text()
    assert 'width="800pt"' in svg or 'width="800' in svg
    assert (tmp_path / "figure_case3.csv").read_text().startswith("theta,re,im\n")


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nalpha = 0.45\nbeta = 0.8\n")
    doc = run_json(capsys, "classify", "--config", str(cfg))
    assert doc["case"] == "4.2.2"
    doc = run_json(capsys, "classify", "--config", str(cfg), "--alpha", "1", "--beta", "0")
    assert doc["case"] == "6"


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma = 3\n")
    assert run(capsys, "classify", "--config", str(cfg), "--alpha", "1", "--beta", "0")[0] == EXIT_USAGE


def test_byte_determinism(capsys):
    argv = ["verify", "--preset", "diag", "--alpha", "0.25", "--beta", "0.25", "--no-probe"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--threads", "3")
    assert a == b


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "rkcond", "classify", "--alpha", "1", "--beta", "1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["case"] == "7"
