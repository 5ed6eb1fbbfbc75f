import io
import json

import pytest

from hse.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, run_command
from hse.complexes import StrictComplex, ThreeTermComplex
from hse.groupring import FiniteAbelianGroup
from hse.io import InstanceError, parse_element, parse_instance, serialize_instance

from conftest import E

Z2 = FiniteAbelianGroup((2,))

MINIMAL = '{"group": [2], "complex": {"shape": "strict", "psi": [[{"[0]": "1", "[1]": "-1"}]]}}'
DIAG = '{"group": [], "complex": {"shape": "strict", "psi": [["0", "0"], ["0", "2"]]}}'
IDENT = '{"group": [2, 2], "complex": {"shape": "strict", "psi": [["1", "0"], ["0", "1"]]}}'


def run(argv):
    out = io.StringIO()
    code = run_command(argv, out)
    return code, out.getvalue()


def fields(text):
    return dict(l.split(": ", 1) for l in text.splitlines() if ": " in l)


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in (("min", MINIMAL), ("diag", DIAG), ("ident", IDENT)):
        p = tmp_path / (name + ".json")
        p.write_text(text)
        paths[name] = str(p)
    return paths


def test_minimal_file_parses():
    inst = parse_instance(MINIMAL)
    assert inst.group.invariant_factors == (2,)
    assert isinstance(inst.complex, StrictComplex)
    assert inst.complex.psi == [[E(Z2, ((0,), 1), ((1,), -1))]]


def test_lambda_shape_error():
    doc = json.loads(MINIMAL)
    doc["complex"] = {"shape": "three", "s1": 1, "s2": 1, "s3": 0, "d1": [["0"]], "d2": []}
    doc["lambda"] = {"conductor": 2, "blocks": [[["1", "0"]], [["1"]]]}
    with pytest.raises(InstanceError) as e:
        parse_instance(json.dumps(doc))
    assert e.value.code == "E_LAMBDA_SHAPE"


def test_syntax_error_has_location():
    with pytest.raises(InstanceError) as e:
        parse_instance('{"group": [2],\n  "complex": }')
    assert e.value.code == "E_SYNTAX"
    assert (e.value.line, e.value.col) == (2, 14)


@pytest.mark.parametrize("bad, code", [
    ('{"group": [2]}', "E_MISSING"),
    ('{"group": [2], "complex": {"shape": "strict", "psi": [["x"]]}}', "E_NUMBER"),
    ('{"group": [2], "complex": {"shape": "strict", "psi": [["1", "0"]]}}', "E_SHAPE"),
    ('{"group": [2], "complex": {"shape": "strict", "psi": [[{"[0,1]": "1"}]]}}', "E_ELEMENT"),
    ('{"group": [2], "complex": {"shape": "nope"}}', "E_COMPLEX"),
])
def test_semantic_error_codes(bad, code):
    with pytest.raises(InstanceError) as e:
        parse_instance(bad)
    assert e.value.code == code


def test_element_forms_agree():
    a = parse_element(Z2, {"[0]": "1/2", "[1]": -3})
    b = parse_element(Z2, [[[0], "1/2"], [[1], "-3"]])
    assert a == b == E(Z2, ((0,), "1/2"), ((1,), -3))
    assert parse_element(Z2, "5") == E(Z2, ((0,), 5))


@pytest.mark.parametrize("shape", ["strict", "three", "finite", "mrs"])
def test_generated_round_trip_is_byte_identical(shape):
    code, text = run(["gen", "--group", "2,2" if shape != "mrs" else "2", "--shape", shape, "--seed", "5"])
    assert code == EXIT_OK
    assert serialize_instance(parse_instance(text)) == text


def test_eta_on_diag(files):
    code, out = run(["eta", "--a", "1", "--x", "b1", files["diag"]])
    f = fields(out)
    assert code == EXIT_OK
    assert f["eta"] == "-2*b1"
    assert f["I(eta).basis"] == "[[2]]"


def test_check_charels_separable(files):
    code, out = run(["check-charels", "--a", "1", files["diag"]])
    assert code == EXIT_OK
    assert "I(eta) == Fit^a: true" in out.splitlines()


def test_cohomology_acyclic(files):
    code, out = run(["cohomology", files["ident"]])
    assert code == EXIT_OK
    assert fields(out)["summary"] == "H1 = 0, H2 = 0"


def test_other_commands_pass(files):
    for argv in (["pairing", "--a", "1"], ["reduce"], ["dual"], ["oracle"], ["fitting", "--a", "1"]):
        code, out = run(argv + [files["diag"]])
        assert code == EXIT_OK, (argv, out)


def test_check_mrs_on_generated(tmp_path):
    p = tmp_path / "m.json"
    code, text = run(["gen", "--group", "2", "--shape", "mrs", "--seed", "1"])
    p.write_text(text)
    code, out = run(["check-mrs", str(p)])
    assert code == EXIT_OK
    assert fields(out)["congruence"] == "true"


def test_exit_codes(files, tmp_path):
    assert run(["frobnicate"])[0] == EXIT_USAGE
    assert run(["cohomology", str(tmp_path / "missing.json")])[0] == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, out = run(["cohomology", str(bad)])
    assert code == EXIT_USAGE and "E_SYNTAX" in out
    assert run(["eta", "--a", "1", "--x", "b7", files["diag"]])[0] == EXIT_USAGE


def test_failed_check_exits_one(tmp_path):
    # x = 0 is allowed by check-charels (containments hold trivially) but the
    # pairing needs x e_a invertible, so it reports a witness and exits 1
    p = tmp_path / "x.json"
    doc = json.loads(DIAG)
    doc["x_element"] = {"[]": "0"}
    p.write_text(json.dumps(doc))
    assert run(["check-charels", "--a", "1", str(p)])[0] == EXIT_OK
    code, out = run(["pairing", "--a", "1", str(p)])
    assert code == EXIT_FAIL
    assert "precondition_failed" in out and "witness" in out


def test_reports_are_deterministic(files):
    for argv in (["eta", "--a", "1", "--x", "b1"], ["check-charels", "--a", "1"], ["oracle"]):
        assert run(argv + [files["diag"]]) == run(argv + [files["diag"]])
    assert run(["gen", "--seed", "9", "--group", "3"]) == run(["gen", "--seed", "9", "--group", "3"])


def test_gen_produces_requested_shape():
    _, text = run(["gen", "--group", "2", "--shape", "three", "--seed", "2"])
    assert isinstance(parse_instance(text).complex, ThreeTermComplex)
