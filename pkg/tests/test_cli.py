import json
import subprocess
import sys
from importlib import resources

import pytest

from mcmassey.cli import run


def cert_path(name):
    return str(resources.files("mcmassey").joinpath(f"certificates/{name}.json"))


def test_cohomology_heisenberg():
    code, doc = run(["cohomology", "--text", "preset heisenberg", "--deg", "0..3"])
    assert code == 0 and doc["status"] == "ok"
    degrees = doc["result"]["degrees"]
    assert [degrees[str(k)]["dim"] for k in range(4)] == [1, 2, 2, 1]
    assert degrees["2"]["representatives"] == ["a1^a3", "a2^a3"]


def test_triple_heisenberg():
    code, doc = run(["triple", "--text", "preset heisenberg", "--classes", "a1", "a1", "a2"])
    assert code == 0
    res = doc["result"]
    assert res["indeterminacy_dim"] == 0 and not res["trivial"]
    assert res["value"]["text"] == "-a1^a3"
    assert res["value"]["matrix"] == [[{"degree": 2, "coords": ["-1", "0"]}]]
    assert res["classical_value"]["text"] == "a1^a3"


def test_triple_sphere_is_trivial():
    code, doc = run(["triple", "--text", "preset sphere 4", "--classes", "x", "x", "x"])
    assert code == 0 and doc["result"]["trivial"]


def test_undefined_exit_code():
    code, doc = run(["triple", "--text", "preset tensor circle circle", "--classes", "t", "t_", "t"])
    assert code == 3 and doc["status"] == "undefined"


def test_parse_error_exit_code():
    code, doc = run(["validate", "--text", "generator a : 1\\nd a = b"])
    assert code == 2
    assert "line 2" in doc["error"]


def test_usage_error_exit_code():
    code, _ = run(["no-such-command"])
    assert code == 2


def test_budget_exit_code():
    code, doc = run(["massey", "--text", "preset witt 4", "--classes", "6*w2", "w1", "w1", "w1",
                     "--budget", "1"])
    assert code == 4 and doc["result"]["budget"] == 1


@pytest.mark.parametrize("name", ["heisenberg_triple", "symplectic_m2", "symplectic_m3",
                                  "witt4_quadruple", "witt4_triple"])
def test_verify_certificates(name):
    code, doc = run(["verify", "--certificate", cert_path(name)])
    assert code == 0 and doc["result"]["accepted"]


def test_verify_rejects_tampered_certificate(tmp_path):
    data = json.loads(open(cert_path("witt4_triple")).read())
    data["claimed"] = "w1^w3"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, doc = run(["verify", "--certificate", str(bad)])
    assert code == 5 and not doc["result"]["accepted"]


def test_blowup_and_lift():
    code, doc = run(["blowup", "--text", "preset kodaira_thurston", "--m", "4"])
    assert code == 0
    code, doc = run(["lift", "--text", "preset kodaira_thurston", "--m", "4", "--classes", "a2", "a1", "a1"])
    assert code == 0
    assert doc["result"]["verdicts"]["C"]["ok"]


def test_bar_command():
    code, doc = run(["bar", "--text", "preset sphere 4", "--len", "3", "--deg", "5"])
    assert code == 0


def test_weight_bound_command():
    code, doc = run(["weight-bound", "--text", "preset witt 4", "--classes", "w1", "w1", "w2",
                     "--limit", "20"])
    assert code == 0


def test_module_entry_point_prints_sorted_json():
    out = subprocess.run([sys.executable, "-m", "mcmassey", "cup", "--text", "preset heisenberg",
                          "--classes", "a1", "a2"], capture_output=True, text=True)
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["result"]["zero"] is True
    assert out.stdout == json.dumps(doc, indent=2, sort_keys=True) + "\n"
