from __future__ import annotations

import io
import json
from importlib import resources

import jsonschema
import pytest

from transurf.cli import EXIT_CHECK, EXIT_INPUT, EXIT_OK, parse_direction, parse_scalar, run
from transurf.exactfield import define_field


def schema(name: str) -> dict:
    with resources.files("transurf.schemas").joinpath(f"{name}.schema.json").open() as fh:
        return json.load(fh)


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(name, *argv):
    code, out, err = call(*argv, "--json")
    data = json.loads(out)
    jsonschema.validate(data, schema(name))
    return code, data


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    paths = {"x3": d / "x3.json", "o6": d / "o6.json", "o6s": d / "o6s.json", "bad": d / "bad.json"}
    assert call("build-family", "--n", "3", "-o", str(paths["x3"]))[0] == EXIT_OK
    assert call("build-origami", "-o", str(paths["o6"]))[0] == EXIT_OK
    assert call("build-origami", "--surface", "-o", str(paths["o6s"]))[0] == EXIT_OK
    bad = json.loads(paths["x3"].read_text())
    bad["gluings"] = bad["gluings"][1:]
    paths["bad"].write_text(json.dumps(bad))
    paths["dir"] = d
    return paths


def test_build_outputs_match_their_schemas(files):
    code, data = call_json("surface", "build-family", "--n", "2")
    assert code == EXIT_OK and len(data["polygons"]) > 0
    code, data = call_json("build-summary", "build-family", "--n", "3", "-o", str(files["dir"] / "again.json"))
    assert data["stratum"] == [2, 2] and data["genus"] == 3
    code, data = call_json("origami", "build-origami")
    assert len(data["h"]) == 6
    jsonschema.validate(json.loads(files["x3"].read_text()), schema("surface"))


def test_build_is_byte_stable(files):
    again = files["dir"] / "x3b.json"
    call("build-family", "--n", "3", "-o", str(again))
    assert again.read_bytes() == files["x3"].read_bytes()
    code, out, _ = call("build-family", "--n", "3")
    assert out == files["x3"].read_text()


def test_validate(files):
    code, data = call_json("validate", "validate", str(files["x3"]))
    assert code == EXIT_OK and data["valid"] and data["stratum"] == [2, 2]
    code, data = call_json("validate", "validate", str(files["bad"]))
    assert code == EXIT_CHECK and not data["valid"] and data["errors"]


def test_decompose_and_classify(files):
    code, data = call_json("decompose", "decompose", str(files["x3"]), "--dir", "0,1")
    assert code == EXIT_OK and data["status"] == "completely-periodic"
    assert len(data["cylinders"]) == 4 and data["weierstrass_points"] == 8
    code, data = call_json("classify", "classify", str(files["x3"]), "--dir", "a,3")
    assert data["label"] == "e" and data["signature"]["cylinders"] == 4
    code, data = call_json("classify", "classify", str(files["o6"]), "--dir", "1,0")
    assert code == EXIT_OK and data["label"] is not None


def test_one_cylinder_direction_has_no_label(tmp_path):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"h": [1], "v": [1]}))
    code, data = call_json("classify", "classify", str(p), "--dir", "2,3")
    assert code == EXIT_OK and data["label"] is None and "no configuration" in data["reason"]


def test_saf_and_certify(files):
    code, data = call_json("saf", "saf", str(files["x3"]), "--dir", "a,3")
    assert data["saf_zero"] is True
    code, data = call_json("certify", "certify", str(files["x3"]), "--dir", "1,0")
    assert data["status"] == "completely-periodic" and data["step"] == "trace"


def test_verify_family(files):
    code, data = call_json("verify-family", "verify-family", "--n-range", "1..3", "--theta")
    assert code == EXIT_OK and data["ok"]
    assert [r["n"] for r in data["reports"]] == [1, 2, 3]
    assert data["reports"][0]["theta"]["rational_value"] == [1, 2]
    code, out, _ = call("verify-family", "--n-range", "2..3", "--jobs", "2")
    assert code == EXIT_OK and "pass" in out


def test_budget_from_the_environment(files, monkeypatch):
    monkeypatch.setenv("FLATSURF_BUDGET", "4")
    code, data = call_json("decompose", "decompose", str(files["x3"]), "--dir", "a,3")
    assert data["status"] == "partial" and data["unresolved"]
    code, data = call_json("decompose", "decompose", str(files["x3"]), "--dir", "a,3", "--budget", "10000")
    assert data["status"] == "completely-periodic"
    monkeypatch.setenv("FLATSURF_BUDGET", "many")
    code, out, err = call("decompose", str(files["x3"]), "--dir", "1,0")
    assert code == EXIT_INPUT and "FLATSURF_BUDGET" in err


def test_origami_cusps_and_enumerate(files):
    code, data = call_json("origami-cusps", "origami-cusps", str(files["o6"]))
    assert data["cusps"] == 3 and sum(data["widths"]) == data["orbit_size"]
    code, data = call_json("enumerate", "enumerate", str(files["o6"]), "--length", "2")
    assert data["count"] == len(data["directions"]) > 0


def test_render(files):
    svg = files["dir"] / "x3.svg"
    code, data = call_json("render", "render", str(files["x3"]), "--dir", "1,0", "--svg", str(svg))
    assert code == EXIT_OK and data["cylinders"] == 3
    text = svg.read_text()
    assert text.startswith("<svg") and "C0" in text and "#9ecae1" in text


def test_global_and_local_json_flags(files):
    a = call("--json", "validate", str(files["x3"]))[1]
    b = call("validate", str(files["x3"]), "--json")[1]
    assert a == b and json.loads(a)["command"] == "validate"


def test_input_errors(files, tmp_path):
    assert call("validate", str(tmp_path / "missing.json"))[0] == EXIT_INPUT
    assert call("decompose", str(files["x3"]), "--dir", "import os,1")[0] == EXIT_INPUT
    assert call("decompose", str(files["x3"]), "--dir", "0,0")[0] == EXIT_INPUT
    assert call("build-family", "--n", "0")[0] == EXIT_INPUT
    assert call("verify-family", "--n-range", "3..1")[0] == EXIT_INPUT
    assert call("no-such-command")[0] == EXIT_INPUT
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert call("validate", str(junk))[0] == EXIT_INPUT


def test_expression_parser():
    K = define_field([-2, 0, 1], (1, 2))
    r = K.gen
    assert parse_scalar("a^2 + 1/3", K) == K(2) + K(1) / 3
    assert parse_scalar("(alpha - 1) * 2", K) == 2 * r - 2
    v = parse_direction("a,-1", K)
    assert (v.x, v.y) == (r, -K.one)
