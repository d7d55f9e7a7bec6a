import json

import pytest

from ahgeom import cli


def run(argv, capsys):
    status = cli.main(argv)
    out = capsys.readouterr()
    return status, out.out, out.err


def test_classify_flat_c2(capsys):
    status, out, _ = run(["classify", "--model", "flat-c2", "--seed", "7", "--json"], capsys)
    assert status == 0
    res = json.loads(out)["results"][0]
    assert res["observed"]["AH1"] is True
    assert res["suites"]["classify"]["tests"]["AH1"]["verdict"] == "pass"


def test_all_cp2(capsys):
    status, out, _ = run(["all", "--model", "cp2", "--seed", "7", "--json"], capsys)
    assert status == 0
    res = json.loads(out)["results"][0]
    assert res["observed"]["mu"] == pytest.approx(4, abs=1e-6)
    assert res["suites"]["spaceform"]["fit"]["fit"]["max"] < 1e-7
    assert res["suites"]["rizza"]["max"] < 1e-6


def test_submanifold_cp1_in_cp2(capsys):
    status, out, _ = run(["submanifold", "--model", "cp1-in-cp2", "--seed", "7", "--json"], capsys)
    assert status == 0
    s = json.loads(out)["results"][0]["suites"]["submanifold"]
    assert s["r_invariance_weak"]["verdict"] == "pass"
    assert s["r_invariance_strong"]["verdict"] == "fail" and s["r_invariance_strong"]["max"] > 0.1
    assert s["theorem61"]["status"] == "CONTRADICTION-CONFIRMED"


def test_report_schema(capsys):
    _, out, _ = run(["constant-type", "--model", "s6", "--json", "--points", "8", "--pairs", "8"], capsys)
    stat = json.loads(out)["results"][0]["suites"]["constant-type"]["constant_type"]
    assert {"name", "max", "mean", "samples", "tolerance", "verdict"} <= set(stat)


def test_reports_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert cli.main(["all", "--model", "s2-in-s6", "--seed", "3", "--report", str(path)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.json"
    cli.main(["all", "--model", "s2-in-s6", "--seed", "4", "--report", str(c)])
    assert c.read_bytes() != a.read_bytes()


def test_floats_use_17_significant_digits(capsys):
    _, out, _ = run(["spaceform", "--model", "cp2", "--json", "--points", "4", "--frames", "2"], capsys)
    alpha = json.loads(out)["results"][0]["suites"]["spaceform"]["fit"]["alpha_sf"]
    assert f"{alpha:.17g}" in out


def test_input_file_and_gating(tmp_path, capsys):
    good = tmp_path / "m.json"
    good.write_text(json.dumps({"name": "warped", "dim": 2, "domain": [[0.5, 1.5], [0, 1]],
                                "g": [["1", "0"], ["0", "x1^2"]], "J": None}))
    status, out, _ = run(["classify", "--input", str(good)], capsys)
    assert status == 0 and "warped: ok" in out
    bad = tmp_path / "b.json"
    bad.write_text(json.dumps({"name": "neg", "dim": 2, "domain": [[0, 1], [0, 1]], "g": [["1", "0"], ["0", "-1"]]}))
    status, out, _ = run(["all", "--input", str(bad), "--json"], capsys)
    res = json.loads(out)["results"][0]
    assert status == 1
    assert "validation failed" in res["suites"]["classify"]["gated"]


@pytest.mark.parametrize(
    "payload, message",
    [
        ('{"name": "x", "dim": 2, "domain": [[0,1],[0,1]], "g": [["1","0"],["0","1 +* x1"]]}', "g[1][1]"),
        ('{"name": "x", "dim": 2', "invalid JSON"),
        ('{"name": "x", "dim": 2, "domain": [[0,1],[0,1]]}', "lacks 'g'"),
        ('{"name": "e", "ambient": "nowhere", "subdim": 1, "phi": ["u1"], "subdomain": [[0,1]]}', "unknown model"),
    ],
)
def test_input_errors(tmp_path, capsys, payload, message):
    path = tmp_path / "in.json"
    path.write_text(payload)
    status, _, err = run(["validate", "--input", str(path)], capsys)
    assert status == 2 and message in err


def test_usage_errors(capsys):
    assert run(["rizza", "--model", "nope"], capsys)[0] == 2
    assert run(["classify", "--model", "cp1-in-cp2"], capsys)[0] == 2
    assert run(["submanifold", "--model", "cp2"], capsys)[0] == 2
    with pytest.raises(SystemExit):
        cli.main(["classify"])
    with pytest.raises(SystemExit):
        cli.main(["classify", "--model", "cp2", "--seed", "-1"])


def test_gated_suites_on_riemannian_models(capsys):
    status, out, _ = run(["all", "--model", "s3", "--json"], capsys)
    res = json.loads(out)["results"][0]
    assert status == 0
    assert "gated" in res["suites"]["constant-type"] and "gated" in res["suites"]["rizza"]


def test_models_listing(capsys):
    status, out, _ = run(["models"], capsys)
    assert status == 0 and "s2-in-s6\tembedding" in out
