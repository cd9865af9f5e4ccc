import json
from pathlib import Path

import pytest

from hpt import cli

GOLDEN = Path(__file__).parent / "golden"

DISC = {"format_version": "1",
        "generators": [{"name": "x", "degree": 1}, {"name": "y", "degree": 0}],
        "differential": {"x": [["2", "y"]]}}

MASSEY = {"format_version": "1",
          "generators": [{"name": "a", "degree": 1}, {"name": "x", "degree": 2},
                         {"name": "u", "degree": 3}, {"name": "z", "degree": 4}],
          "differential": {"u": [["-1", "x"]]},
          "structure": {"kind": "associative",
                        "entries": {"a,a": [["-1", "x"]], "a,u": [["-1", "z"]]}}}

COMMUTATIVE = {"format_version": "1",
               "generators": [{"name": n, "degree": d} for n, d in
                              (("a", 2), ("b", 2), ("x", 4), ("y", 4), ("u", 5), ("v", 5), ("z", 7))],
               "differential": {"u": [["1", "x"]], "v": [["1", "y"]]},
               "structure": {"kind": "associative", "entries": {
                   "a,b": [["1", "x"]], "b,a": [["1", "x"]], "b,b": [["1", "y"]],
                   "u,b": [["1", "z"]], "b,u": [["1", "z"]],
                   "a,v": [["2", "z"]], "v,a": [["2", "z"]]}}}


@pytest.fixture
def run(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)

    def go(doc, *argv, raw=None, name="in.json"):
        Path(name).write_text(raw if raw is not None else json.dumps(doc, indent=1))
        code = cli.main([argv[0], name, *argv[1:]] if argv[0] != "check" else list(argv))
        out, err = capsys.readouterr()
        return code, (json.loads(out) if out else None), err
    return go


def _check(out, name):
    return next(c for c in out["checks"] if c["name"] == name)


def test_validate_disc(run):
    code, out, _ = run(DISC, "validate")
    assert code == 0 and out["status"] == "pass"


def test_validate_reports_d_squared(run):
    dd = {"format_version": "1",
          "generators": [{"name": "x", "degree": 0}, {"name": "y", "degree": 0}],
          "differential": {"x": [["1", "y"]], "y": [["1", "x"]]}}
    code, out, _ = run(dd, "validate")
    assert code == 1 and out["status"] == "fail"
    assert not _check(out, "d has degree -1")["status"] == "pass"
    dd2 = _check(out, "d^2 = 0")
    assert dd2["status"] == "fail" and dd2["witness"][0] == "x"


def test_validate_square_nonzero(run):
    doc = {"format_version": "1",
           "generators": [{"name": "x", "degree": 1}, {"name": "y", "degree": 0},
                          {"name": "w", "degree": 2}],
           "differential": {"x": [["1", "y"]], "w": [["1", "x"]]}}
    code, out, _ = run(doc, "validate")
    assert code == 1
    c = _check(out, "d^2 = 0")
    assert not c["status"] == "pass" and "w" in json.dumps(c)


def test_parse_errors_carry_position(run):
    raw = ('{"format_version": "1",\n "generators": [{"name": "x", "degree": 1}, '
           '{"name": "y", "degree": 0}],\n "differential": {"x": [["1/0", "y"]]}}')
    code, out, err = run(None, "validate", raw=raw)
    assert code == 2 and out is None
    assert "in.json:3:" in err and "zero denominator" in err
    code, _, err = run(None, "validate", raw="{not json")
    assert code == 2 and "in.json:1:" in err


def test_non_reduced_coefficient_rejected(run):
    doc = dict(DISC, differential={"x": [["2/4", "y"]]})
    code, _, err = run(doc, "validate")
    assert code == 2 and "lowest terms" in err


def test_max_arity_cap(run, monkeypatch):
    monkeypatch.setenv("HPT_MAX_ARITY", "3")
    code, _, err = run(MASSEY, "transfer", "--type", "ainf", "--max-arity", "4")
    assert code == 2 and "HPT_MAX_ARITY" in err


def test_wrong_type_is_a_usage_error(run):
    code, _, err = run(MASSEY, "transfer", "--type", "linf")
    assert code == 2


def test_transfer_zero_products(run):
    doc = dict(DISC, generators=DISC["generators"] + [{"name": "p", "degree": 0}],
               structure={"kind": "associative", "entries": {}})
    code, out, _ = run(doc, "transfer", "--type", "ainf", "--max-arity", "4")
    assert code == 0
    assert out["result"]["structure"]["entries"] == {}


def test_transfer_massey(run):
    code, out, _ = run(MASSEY, "transfer", "--type", "ainf", "--max-arity", "3")
    assert code == 0
    assert out["operations"]["3"]
    assert _check(out, "m_2 is induced")["status"] == "pass"
    assert "timing" not in out


def test_transfer_shuffles_and_trees(run):
    code, out, _ = run(COMMUTATIVE, "transfer", "--type", "ainf", "--max-arity", "3",
                       "--check-shuffles")
    assert code == 0 and out["operations"]["3"]
    code, out, _ = run(MASSEY, "transfer", "--type", "ainf", "--max-arity", "4",
                       "--oracle-trees")
    assert code == 0
    assert out["oracles"]["tree_sign_rule"] == [1, 0, 1, 0]


def test_transfer_along_cancellation(run):
    doc = dict(MASSEY, contraction={"cancel": [["u", "x"]]})
    code, out, _ = run(doc, "transfer", "--type", "ainf", "--max-arity", "3")
    assert code == 0 and out["operations"]["3"]
    code, _, err = run(dict(MASSEY, contraction={"cancel": [["a", "x"]]}),
                       "transfer", "--type", "ainf")
    assert code == 2 and "cannot cancel" in err


def test_minimal_model_cases(run):
    acyclic = dict(DISC, structure={"kind": "associative", "entries": {}})
    code, out, _ = run(acyclic, "minimal-model", "--type", "ainf")
    assert code == 0 and out["result"]["generators"] == []
    code, out, _ = run(MASSEY, "minimal-model", "--type", "ainf", "--max-arity", "4")
    assert code == 0 and _check(out, "m_1 = 0")["status"] == "pass"
    flat = {"format_version": "1", "generators": [{"name": "p", "degree": 0}],
            "structure": {"kind": "associative", "entries": {"p,p": [["1", "p"]]}}}
    code, out, _ = run(flat, "minimal-model", "--type", "ainf")
    assert code == 0 and out["result"]["structure"]["entries"] == {"p,p": [["1", "p"]]}


def test_minimal_model_lie(run):
    dgl = {"format_version": "1",
           "generators": [{"name": "e", "degree": 0}, {"name": "u", "degree": 1},
                          {"name": "v", "degree": 0}],
           "differential": {"u": [["1", "v"]]},
           "structure": {"kind": "lie", "entries": {"e,u": [["1", "u"]], "e,v": [["1", "v"]]}}}
    code, out, _ = run(dgl, "minimal-model", "--type", "linf", "--max-arity", "3")
    assert code == 0 and out["status"] == "pass"


def test_invalid_structure_fails_before_transfer(run):
    bad = dict(MASSEY, structure={"kind": "associative",
                                  "entries": {"a,x": [["1", "u"]]}})
    code, out, _ = run(bad, "transfer", "--type", "ainf", "--max-arity", "3")
    assert code == 1 and out["status"] == "fail" and "result" not in out


def test_output_is_deterministic_and_revalidates(run):
    _, first, _ = run(MASSEY, "minimal-model", "--type", "ainf", "--max-arity", "4")
    _, second, _ = run(MASSEY, "minimal-model", "--type", "ainf", "--max-arity", "4")
    assert json.dumps(first) == json.dumps(second)
    code, out, _ = run(first, "validate", name="out.json")
    assert code == 0 and out["status"] == "pass"


def test_golden_minimal_model(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    Path("massey.json").write_text(json.dumps(MASSEY))
    assert cli.main(["minimal-model", "massey.json", "--type", "ainf", "--max-arity", "4"]) == 0
    got = capsys.readouterr().out
    assert got == (GOLDEN / "massey_minimal_model.json").read_text()


def test_output_file(run, tmp_path):
    code, out, _ = run(DISC, "validate", "-o", "report.json")
    assert code == 0 and out is None
    assert json.loads((tmp_path / "report.json").read_text())["status"] == "pass"


@pytest.mark.parametrize("suite", ["contraction", "thick", "schur", "opalg"])
def test_check_suites(run, suite):
    code, out, _ = run(None, "check", "--suite", suite, "--cases", "1")
    assert code == 0 and out["status"] == "pass"


def test_check_zero_cases_and_usage(run):
    code, out, _ = run(None, "check", "--suite", "contraction", "--cases", "0")
    assert code == 0 and out["checks"] == []
    code, _, _ = run(None, "check", "--suite", "nonsense")
    assert code == 2
    code, _, _ = run(None, "check", "--suite", "contraction", "--cases", "-1")
    assert code == 2
