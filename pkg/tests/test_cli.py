import json
import subprocess
import sys

import pytest

from brstack.cli import RunRequest, main, run

VERDICT_DOC = json.dumps({
    "schema": "brstack/v1",
    "stack": {"kind": "BDiscrete", "rank": 2},
    "base": {"units_torsion": [6], "br_prime": [2]},
})


def invoke(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def grp(js):
    return js["rank"], js["invariant_factors"]


def report(text):
    doc = json.loads(text)
    assert doc["schema"] == "brstack/v1"
    return doc


def test_snf(capsys):
    code, out, _ = invoke(["snf", "--matrix", "[[2,4],[6,8]]"], capsys)
    assert code == 0
    doc = report(out)
    assert doc["report"]["diagonal"] == ["2", "4"] and doc["report"]["verified"] is True
    assert doc["anchors"]


def test_big_integers_are_strings(capsys):
    big = 10**30
    code, out, _ = invoke(["snf", "--matrix", json.dumps([[str(big), "0"], ["0", "1"]])], capsys)
    assert code == 0 and report(out)["report"]["invariant_factors"] == ["1", str(big)]


def test_malformed_json(capsys):
    code, _, err = invoke(["snf", "--matrix", "[[2,4],"], capsys)
    assert code == 2 and "malformed JSON" in report(err)["error"]
    code, _, _ = invoke(["verdict", "--json", "{not json"], capsys)
    assert code == 2


def test_group_cohomology(capsys):
    mod = json.dumps({"generators": 1, "relations": [], "actions": [[[-1]], [[1]]]})
    code, out, _ = invoke(["group-cohomology", "--module", mod], capsys)
    groups = [c["group"] for c in report(out)["report"]["cohomology"]]
    assert code == 0 and grp(groups[2]) == ("0", ["2"])
    code, out, _ = invoke(["group-cohomology", "--group", "[12]"], capsys)
    assert grp(report(out)["report"]["cohomology"][2]["group"]) == ("0", ["12"])


def test_torus_and_gln(capsys):
    code, out, _ = invoke(["torus-complex", "--rank", "2", "--max-degree", "5", "--audit"], capsys)
    body = report(out)["report"]
    assert code == 0
    assert grp(body["degrees"][1]["E2"]) == ("2", [])
    assert body["degrees"][1]["m_block_is_zero"] is True
    assert all(grp(d["E2"]) == ("0", []) for d in body["degrees"][2:])
    code, out, _ = invoke(["gln-bottom-row", "--n", "3", "--max-degree", "4"], capsys)
    body = report(out)["report"]
    assert code == 0 and body["matches_rank_one_torus"] and body["det_multiplicative_checked"]


def test_azumaya(capsys):
    code, out, _ = invoke(["azumaya", "--n", "2"], capsys)
    body = report(out)["report"]
    assert code == 0 and body["identity"]["holds"]
    assert body["identity"]["relation"] == "beta_a = beta_b * xi_ab^2"


def test_gln_units(capsys):
    code, out, _ = invoke(["gln-units", "--base", "ZZ[a]/(a^2)", "--w", "det + a", "--w-inv", "(det - a)*det^-2"], capsys)
    assert code == 0 and report(out)["report"]["result"]["kind"] == "NotImage"
    code, out, _ = invoke(["gln-units", "--base", "GF(11)", "--n", "3", "--w", "7*det^3", "--w-inv", "8*det^-3"], capsys)
    assert report(out)["report"]["result"] == {"kind": "Image", "a": "7", "m": "3"}
    code, _, _ = invoke(["gln-units", "--w", "det*(det + 1)", "--w-inv", "det^-1"], capsys)
    assert code == 1
    code, _, _ = invoke(["gln-units", "--n", "7", "--w", "det", "--w-inv", "det^-1"], capsys)
    assert code == 2
    code, _, _ = invoke(["gln-units", "--base", "QQ", "--w", "1", "--w-inv", "1"], capsys)
    assert code == 2


def test_elliptic(capsys):
    code, out, _ = invoke(["elliptic", "--field", "Q", "--a", "-1", "--b", "0"], capsys)
    assert code == 0 and report(out)["report"]["verdict"] == "BrNotEqual"
    code, out, _ = invoke(["elliptic", "--field", "Q", "--a", "0", "--b", "2"], capsys)
    assert report(out)["report"]["verdict"] == "BrEqualsBrPrime"
    code, out, _ = invoke(["elliptic", "--field", "13", "--a", "2", "--b", "5"], capsys)
    assert code == 0 and report(out)["report"]["group"]["hasse_bound_ok"]
    assert invoke(["elliptic", "--field", "Q", "--a", "0", "--b", "0"], capsys)[0] == 2
    assert invoke(["elliptic", "--field", "R", "--a", "1", "--b", "1"], capsys)[0] == 2


def test_verdict(capsys):
    code, out, _ = invoke(["verdict", "--json", VERDICT_DOC], capsys)
    doc = report(out)
    assert code == 0 and doc["report"]["conclusion"] == "SBMIFails"
    assert grp(doc["report"]["br_prime_model"]) == ("0", ["2", "6"])
    assert any("Z^r" in a for a in doc["anchors"])
    unknown = json.dumps({"stack": {"kind": "BGLn", "n": 3}, "base": {}})
    code, out, _ = invoke(["verdict", "--json", unknown], capsys)
    assert code == 3 and report(out)["report"]["missing_hypothesis"].startswith("missing normality")
    code, _, _ = invoke(["verdict", "--json", json.dumps({"schema": "v0", "stack": {"kind": "BGLn", "n": 1}})], capsys)
    assert code == 2


def test_output_file(tmp_path, capsys):
    dest = tmp_path / "r.json"
    code, out, _ = invoke(["-o", str(dest), "azumaya", "--n", "3"], capsys)
    assert code == 0 and out == ""
    assert report(dest.read_text())["command"] == "azumaya"


def test_input_file(tmp_path, capsys):
    src = tmp_path / "doc.json"
    src.write_text(VERDICT_DOC)
    assert invoke(["verdict", "--input", str(src)], capsys)[0] == 0
    assert invoke(["verdict", "--input", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_unknown_subcommand_via_run():
    code, text = run(RunRequest("frobnicate"))
    assert code == 2 and "unknown subcommand" in text


@pytest.mark.parametrize("argv", [
    ["snf", "--matrix", "[[3,1],[1,3]]"],
    ["verdict", "--json", VERDICT_DOC],
])
def test_module_entry_point_is_deterministic(argv):
    outs = [subprocess.run([sys.executable, "-m", "brstack", *argv], capture_output=True, text=True, check=True).stdout
            for _ in range(2)]
    assert outs[0] == outs[1] and outs[0]
