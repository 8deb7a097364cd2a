"""Tests for the command line interface."""

import json

import pytest

from linear_sites.__main__ import main
from linear_sites.error import EXIT_CAP, EXIT_FAILURE, EXIT_INPUT, EXIT_PASS
from linear_sites.workspace import load


@pytest.fixture
def run(capsys):
    """Run the CLI and return its exit code and parsed stdout."""

    def _run(*argv):
        code = main([str(arg) for arg in argv])
        return code, json.loads(capsys.readouterr().out)

    return _run


def test_init(run, tmp_path):
    path = tmp_path / "ws.json"
    code, report = run("init", path)
    assert code == EXIT_PASS
    assert report["command"] == "init"
    assert "cover_systems/alpha" in report["inputs"]
    assert load(path).system("alpha").name == "alpha"


def test_validate_flags_empty_system(run, workspace_file):
    code, report = run("validate", workspace_file)
    assert code == EXIT_FAILURE
    assert report["verdicts"]["system/empty-at-1"] is False
    assert report["verdicts"]["category/S1"] is True
    assert report["counterexamples"][0]["subject"] == "system/empty-at-1"


def test_axioms(run, workspace_file):
    code, report = run("axioms", workspace_file, "alpha")
    assert code == EXIT_PASS
    assert report["verdicts"] == {"localizing": True, "topology": True}
    code, report = run("axioms", workspace_file, "raw-singleton")
    assert code == EXIT_FAILURE
    assert {v["axiom"] for v in report["counterexamples"]} == {"identity", "pullback"}


def test_closure_with_sieve(run, workspace_file):
    sieve = json.dumps({"target": "2", "components": {"1": [[1]]}})
    code, report = run("closure", workspace_file, "alpha", "--object", "2", "--sieve", sieve)
    assert code == EXIT_PASS
    assert report["verdicts"] == {"covering": True}
    assert report["witnesses"][0]["kind"] == "up"
    assert report["data"]["minimal_covers"]["2"] == [
        {"target": "2", "components": {"1": [[1]]}}
    ]


def test_check_functor(run, workspace_file):
    code, report = run("check-functor", workspace_file, "incl1")
    assert code == EXIT_PASS
    assert report["verdicts"] == {"LC": True}
    code, report = run("check-functor", workspace_file, "incl2", "G")
    assert code == EXIT_FAILURE
    assert report["counterexamples"][0]["property"] == "G"


def test_tensor_site(run, workspace_file, tmp_path):
    out = tmp_path / "tensor.json"
    code, report = run(
        "tensor-site", workspace_file, "alpha", "alpha", "--name", "aa", "--out", out
    )
    assert code == EXIT_PASS
    assert report["data"]["proper_basic_covers"] == 4
    assert report["data"]["objects"] == 4
    assert load(out).system("aa").category.factors is not None


def test_sheaf(run, workspace_file):
    code, report = run("sheaf", workspace_file, "h(2)", "alpha")
    assert code == EXIT_PASS
    assert report["data"] == {"sheaf": True, "null_presheaf": False}


def test_sheafify(run, workspace_file, tmp_path):
    out = tmp_path / "sheafified.json"
    code, report = run("sheafify", workspace_file, "S(1)", "alpha", "--out", out)
    assert code == EXIT_PASS
    assert report["verdicts"] == {"output_is_sheaf": True}
    assert report["data"]["dims_after"] == {"1": 1, "2": 1}
    assert load(out).module("a(S(1))").dims == {"1": 1, "2": 1}


def test_serre_gabriel(run, workspace_file):
    code, report = run(
        "serre", "gabriel", workspace_file, "h(2)", "--w1", "supported:1", "--w2", "supported:2"
    )
    assert code == EXIT_PASS
    assert report["data"]["member"] is True
    _, report = run(
        "serre", "gabriel", workspace_file, "h(2)", "--w1", "supported:2", "--w2", "supported:1"
    )
    assert report["data"]["member"] is False


def test_enumerate_sieves(run, workspace_file):
    code, report = run("enumerate", "sieves", workspace_file, "S1", "2")
    assert code == EXIT_PASS
    assert report["data"]["counts"] == {"2": 3}


def test_zalg_from_graded(run, workspace_file, tmp_path):
    out = tmp_path / "z.json"
    code, report = run(
        "zalg", "from-graded", workspace_file, "k[x,y]", "--hi", 3, "--name", "a", "--out", out
    )
    assert code == EXIT_PASS
    assert report["data"]["pieces"]["3,1"] == 3
    assert report["data"]["generated_in_degree_one"] is True
    assert load(out).zalgebra("a").hi == 3


def test_check_delta(workspace_file, capsys):
    code = main(["zalg", "check-delta", str(workspace_file), "k[x]", "k[y]", "--hi", "2"])
    captured = capsys.readouterr()
    report = json.loads(captured.out)
    assert code == EXIT_PASS
    assert report["verdicts"] == {"LC": True}
    assert report["window_limited"] is True
    assert "(window-limited)" in captured.err


def test_check_delta_two_variables(run, workspace_file):
    code, report = run(
        "zalg", "check-delta", workspace_file, "k[x,y]", "k[u,v]", "--hi", 3
    )
    assert code == EXIT_PASS
    assert report["verdicts"] == {"LC": True}
    assert report["window_limited"] is True
    assert report["data"]["details"]["window"] == [0, 3]
    assert len(report["witnesses"]) == 12
    assert all(w["generates"] for w in report["witnesses"])


def test_unknown_name_is_input_error(run, workspace_file):
    code, report = run("axioms", workspace_file, "missing")
    assert code == EXIT_INPUT
    assert report["problem"]["code"] == "workspace-error"


def test_cap_exceeded(run, workspace_file):
    code, report = run("--cap-sieve", 2, "enumerate", "sieves", workspace_file, "S1", "2")
    assert code == EXIT_CAP
    assert report["problem"]["code"] == "cap-exceeded"
    assert report["problem"]["requested"] == 4


def test_caps_are_reported(run, workspace_file):
    _, report = run("--glue-depth", 1, "--json", "sheaf", workspace_file, "h(2)", "alpha")
    assert report["caps"]["glue_depth"] == 1
    assert report["caps"]["sieve_cap"] == 2**16
