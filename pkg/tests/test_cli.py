import json
import os

import pytest
from click.testing import CliRunner

from charvar import cli, tqft
from charvar.errors import BranchFailure
from charvar.poly import ZetaExpr, parse, parse_zeta

from conftest import tt2_commutator_path


def run(*args, input=None):
    return CliRunner().invoke(cli.main, list(args), input=input)


def test_zeta_u3():
    r = run("zeta", "--family", "un", "--n", "3")
    assert r.exit_code == 0 and r.output.strip() == "q^2 + (q - 1)*q^(-s)"


def test_zeta_json_roundtrip():
    r = run("zeta", "--family", "tn", "--n", "3", "--json")
    assert ZetaExpr.from_json(json.loads(r.output)) == parse_zeta(run("zeta", "--family", "tn", "--n", "3").output)


def test_eval_s():
    r = run("zeta", "--family", "un", "--n", "3", "--eval-s", "0", "--json")
    assert parse(json.loads(r.output)["value"]) == parse("q^2 + q - 1")


def test_motive_u2():
    r = run("motive", "--family", "un", "--n", "2", "--genus", "3")
    assert r.exit_code == 0 and r.output.strip() == "q^6"


def test_motive_symbolic_and_punctures():
    r = run("motive", "--family", "tt", "--n", "2", "--symbolic", "--json")
    assert r.exit_code == 0 and json.loads(r.output)["terms"]
    r = run("motive", "--family", "tt", "--n", "2", "--genus", "1", "--punctures", "2", "--json")
    assert r.exit_code == 0
    assert parse(json.loads(r.output)["value"]) == tqft.twisted_class("Tt", 2, 1, [1])


def test_strata_fixture():
    r = run("strata-class", tt2_commutator_path())
    assert r.exit_code == 0 and r.output.strip() == "q^2*(q - 1)"
    r = run("strata-class", tt2_commutator_path(), "--trace")
    doc = json.loads(r.output)
    assert doc["value"] == "q^3 - q^2" and doc["trace"]["children"]


def test_exit_codes(monkeypatch):
    circle = json.dumps({"vars": ["x", "y"], "zero": ["x^2 + y^2 - 1"]})
    r = run("strata-class", "--json", input=circle)
    assert r.exit_code == cli.EXIT_ALGORITHM and json.loads(r.output)["error"] == "AlgorithmFailure"
    assert run("strata-class", input="{not json").exit_code == cli.EXIT_USAGE
    assert run("strata-class", input='{"vars": ["a"], "zero": ["b"]}').exit_code == cli.EXIT_USAGE
    assert run("zeta", "--family", "xx", "--n", "2").exit_code == cli.EXIT_USAGE
    assert run("zeta", "--family", "un", "--n", "9").exit_code == cli.EXIT_USAGE
    assert run("motive", "--family", "un", "--n", "2").exit_code == cli.EXIT_USAGE
    assert run("verify", "--family", "un", "--n", "4", "--budget", "10").exit_code == cli.EXIT_RESOURCE

    def boom(family, n):
        raise BranchFailure("stuck", "z")
    monkeypatch.setattr("charvar.zeta.zeta_family", boom)
    assert run("zeta", "--family", "un", "--n", "5").exit_code == cli.EXIT_BRANCH


def test_verify():
    r = run("verify", "--family", "un", "--n", "4", "--q", "2,3", "--genus", "1", "--json")
    doc = json.loads(r.output)
    assert r.exit_code == 0 and doc["ok"] and len(doc["rows"]) == 4


def test_crosscheck_and_classes():
    r = run("crosscheck", "--n-max", "2", "--genus-max", "2", "--json")
    assert r.exit_code == 0 and json.loads(r.output)["ok"]
    r = run("classes", "--n", "2")
    assert r.exit_code == 0 and "M = 2" in r.output and "N = 3" in r.output
    assert run("classes", "--n", "5").exit_code == cli.EXIT_USAGE


def test_epoly():
    r = run("epoly", "--family", "un", "--n", "3", "--genus", "1", "--uv")
    assert r.exit_code == 0 and "u" in r.output
    r = run("epoly", "--family", "tn", "--n", "2", "--json")
    assert r.exit_code == 0 and json.loads(r.output)["terms"]


def test_poly_dsl():
    r = run("poly", "(q - 1)*(q + 1)")
    assert r.output.strip() == "q^2 - 1"
    assert run("poly", "q +").exit_code == cli.EXIT_USAGE


def test_cache_roundtrip(tmp_path, monkeypatch):
    d = str(tmp_path / "cache")
    args = ["motive", "--family", "tn", "--n", "3", "--genus", "2", "--json", "--cache-dir", d]
    tqft._models.clear()
    cold = run(*args).output
    files = sorted(os.listdir(d))
    assert any(f.startswith("catalog-n3") for f in files)
    assert any(f.startswith("tables-") for f in files)
    tqft._models.clear()
    warm = run(*args).output
    assert warm == cold
    monkeypatch.setenv("CHARVAR_CACHE", str(tmp_path / "env"))
    run("zeta", "--family", "un", "--n", "4")
    assert os.listdir(tmp_path / "env") == ["zeta-un-n4-v1.json"]
    tqft._models.clear()
