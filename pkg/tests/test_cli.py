import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from possible_worlds import LatentSpec, io, simulate
from possible_worlds.cli import main
from possible_worlds.errors import InvalidDistribution

import scenarios as sc

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_check_incompatible(capsys):
    code, out, _ = run(capsys, "check", DATA / "w_structure.json", DATA / "w_support.json")
    report = json.loads(out)
    assert code == 2 and report["verdict"] == "INCOMPATIBLE"
    assert report["support_size"] == 2


def test_check_compatible_writes_certificate(capsys, tmp_path):
    cert_path = tmp_path / "cert.json"
    code, out, _ = run(capsys, "check", DATA / "pair.json", DATA / "pair_distribution.json",
                       "--certificate", cert_path)
    report = json.loads(out)
    assert code == 0 and report["verdict"] == "COMPATIBLE" and report["certificate_verified"]
    code, out, _ = run(capsys, "simulate", DATA / "pair.json", cert_path)
    p = io.distribution_from_json(json.loads(out))
    assert set(p.outcomes()) == set(sc.PAIR_EVENTS)


def test_check_writes_cnf(capsys, tmp_path):
    cnf = tmp_path / "w.cnf"
    code, _, _ = run(capsys, "check", DATA / "w_structure.json", DATA / "w_support.json", "--cnf", cnf)
    assert code == 2
    text = cnf.read_text()
    assert "p cnf" in text and text.startswith("c 1 O a")
    code, _, err = run(capsys, "check", DATA / "pair.json", DATA / "pair_distribution.json", "--cnf", cnf)
    assert code == 1 and "NonBooleanVisible" in err


def test_simulate_chain_certificate(capsys):
    code, out, _ = run(capsys, "simulate", DATA / "chain.json", DATA / "chain_certificate.json")
    assert code == 0
    assert io.distribution_from_json(json.loads(out)) == sc.chain_distribution()


def test_normalize_reports_changes(capsys, tmp_path):
    target = tmp_path / "n.json"
    code, out, err = run(capsys, "normalize", DATA / "latent_with_parents.json", "--out", target)
    assert code == 0 and out == ""
    g = io.read_structure(target)
    assert g.graph.parents("l") == frozenset()
    assert "edges added: v2->v4" in err
    assert "edges removed: v1->l" in err


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", DATA / "bell.json")
    rows = {r["latent"]: r for r in json.loads(out)["bounds"]}
    assert rows["rho"]["bound"] == 12 and rows["rho"]["conditioning"] == ["x", "y"]
    assert rows["mu"]["bound"] == 1


def test_enumerate_jsonl(capsys):
    code, out, _ = run(capsys, "enumerate", DATA / "w_structure.json", "--latent-cards", "mu=1,nu=2")
    lines = out.splitlines()
    assert code == 0 and lines
    for line in lines:
        record = json.loads(line)
        assert sum(Fraction(e["p"]) for e in record["events"]) == 1
    code, out, _ = run(capsys, "enumerate", DATA / "w_structure.json", "--latent-cards", "2", "--witnesses")
    record = json.loads(out.splitlines()[0])
    cert = io.certificate_from_json(record["witness"], sc.w_structure())
    assert simulate(sc.w_structure(), cert.table, LatentSpec(cert.latent_cards)) == \
        io.distribution_from_json({k: record[k] for k in ("variables", "cardinalities", "events")})


def test_enumerate_usage_errors(capsys):
    assert run(capsys, "enumerate", DATA / "w_structure.json", "--latent-cards", "zz=2")[0] == 1
    assert run(capsys, "enumerate", DATA / "w_structure.json", "--latent-cards", "mu=2")[0] == 1
    assert run(capsys, "enumerate", DATA / "w_structure.json", "--latent-cards", "x")[0] == 1
    code, _, err = run(capsys, "enumerate", DATA / "w_structure.json", "--latent-cards", "3", "--node-cap", "10")
    assert code == 1 and "EnumerationBudgetExceeded" in err


def test_test_order(capsys):
    code, out, _ = run(capsys, "test-order", DATA / "pair.json", DATA / "pair_distribution.json", "-K", "2")
    report = json.loads(out)
    assert code == 0 and report["verdict"] == "PASS" and report["min_distance"] == "0/1"
    assert "certificate" in report and report["C_override"] is False
    code, out, _ = run(capsys, "test-order", DATA / "bell.json", DATA / "pr_box.json", "-K", "1", "--C", "1")
    report = json.loads(out)
    assert code == 2 and report["verdict"] == "FAIL"
    assert report["epsilon"] == "0/1" and report["min_distance"] == "7/4" and report["C_override"] is True
    assert run(capsys, "test-order", DATA / "pair.json", DATA / "pair_distribution.json", "-K", "0")[0] == 1


def test_distance(capsys):
    code, out, _ = run(capsys, "distance", DATA / "pr_box.json", DATA / "pr_box.json")
    assert code == 0 and out.strip() == "0/1"


def test_error_paths(capsys, tmp_path):
    code, _, err = run(capsys, "check", DATA / "cyclic.json", DATA / "w_support.json")
    assert code == 1 and "CyclicGraph" in err
    code, _, err = run(capsys, "check", tmp_path / "missing.json", DATA / "w_support.json")
    assert code == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "check", DATA / "w_structure.json", bad)[0] == 1
    assert run(capsys, "check", DATA / "w_structure.json", DATA / "pr_box.json")[0] == 1
    assert run(capsys, "bounds")[0] == 1
    assert run(capsys, "check", DATA / "w_structure.json", DATA / "w_support.json", "--threads", "0")[0] == 1
    assert main(["--help"]) == 0


def test_json_readers_reject_malformed_documents():
    with pytest.raises(io.FormatError):
        io.structure_from_json({"visible": [{"name": "a"}], "edges": []})
    with pytest.raises(io.FormatError):
        io.structure_from_json({"visible": [], "edges": [["a"]]})
    with pytest.raises(InvalidDistribution):
        io.distribution_from_json({"variables": ["a"], "cardinalities": [2],
                                   "events": [{"outcome": [0], "p": 0.5}, {"outcome": [1], "p": "1/2"}]})
    with pytest.raises(InvalidDistribution):
        io.support_from_json({"variables": ["a"], "cardinalities": [2],
                              "events": [{"outcome": [0]}, {"outcome": [0]}]})


def test_round_trips():
    for g in (sc.bell(), sc.evans(), sc.mixed_parents()):
        assert io.structure_from_json(io.structure_to_json(g)) == g
    p = sc.pr_box()
    assert io.distribution_from_json(io.distribution_to_json(p)) == p
    s = io.support_from_json(io.distribution_to_json(p))
    assert s.as_set() == set(sc.PR_EVENTS)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "possible_worlds", "distance",
                           str(DATA / "pr_box.json"), str(DATA / "pr_box.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "0/1"
