"""End-to-end command-line behaviour: outputs, exit codes, determinism."""

import json
from pathlib import Path

import pytest

from cfdiag.cli import main
from cfdiag.measures import DiagnosisRanking
from cfdiag.vignettes import load_vignettes

REPO = Path(__file__).resolve().parents[1]
TINY = str(REPO / "models" / "tiny.json")
TINY_EV = str(REPO / "models" / "tiny_evidence.json")


@pytest.fixture
def bad_model(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(
        json.dumps(
            {
                "risk_factors": [],
                "diseases": [{"id": "d", "leak": 0.0, "parents": []}],
                "symptoms": [],
            }
        )
    )
    return str(p)


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def test_validate_ok(capsys):
    assert main(["validate", "--model", TINY]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ok"] is True
    assert out["counts"] == {"risk_factors": 0, "diseases": 1, "symptoms": 1}


def test_validate_reports_issues_and_fails(bad_model, capsys):
    assert main(["validate", "--model", bad_model]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["ok"] is False
    assert out["issues"][0]["code"] == "lambda-range"


def test_validate_missing_file(capsys):
    assert main(["validate", "--model", "/no/such/file.json"]) == 1
    assert "not found" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# diagnose
# ---------------------------------------------------------------------------


def test_diagnose_anchor_value(capsys):
    assert (
        main(["diagnose", "--model", TINY, "--evidence", TINY_EV, "--measure", "sufficiency"])
        == 0
    )
    payload = json.loads(capsys.readouterr().out)
    ranking = DiagnosisRanking.from_dict(payload)
    assert ranking.entries[0].disease == "d1"
    assert ranking.entries[0].value == pytest.approx(0.814480, abs=1e-6)
    assert ranking.posteriors[0] == pytest.approx(0.841629, abs=1e-6)


def test_diagnose_all_measures_parse_back(capsys):
    assert (
        main(["diagnose", "--model", TINY, "--evidence", TINY_EV, "--measure", "all"]) == 0
    )
    payload = json.loads(capsys.readouterr().out)
    assert set(payload["rankings"]) == {"posterior", "sufficiency", "disablement"}
    for m, d in payload["rankings"].items():
        r = DiagnosisRanking.from_dict(d)
        assert r.measure == m
        assert r.disease_order() == ("d1",)


def test_diagnose_is_byte_deterministic(tmp_path):
    out1, out2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    for out in (out1, out2):
        assert (
            main(
                ["diagnose", "--model", TINY, "--evidence", TINY_EV, "--out", out]
            )
            == 0
        )
    assert Path(out1).read_bytes() == Path(out2).read_bytes()


def test_diagnose_top_trims(two_disease, tmp_path, capsys):
    from cfdiag.network import save_network

    model = str(tmp_path / "m.json")
    save_network(two_disease, model)
    ev = str(tmp_path / "e.json")
    Path(ev).write_text(json.dumps({"risks": {}, "positive": ["s1"], "negative": []}))
    assert main(["diagnose", "--model", model, "--evidence", ev, "--top", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["entries"]) == 1


def test_diagnose_invalid_model_exits_one(bad_model, capsys):
    assert main(["diagnose", "--model", bad_model, "--evidence", TINY_EV]) == 1
    assert "invalid model" in capsys.readouterr().err


def test_diagnose_bad_evidence_exits_one(tmp_path, capsys):
    ev = str(tmp_path / "e.json")
    Path(ev).write_text(json.dumps({"positive": ["nope"]}))
    assert main(["diagnose", "--model", TINY, "--evidence", ev]) == 1


def test_usage_errors_exit_two():
    with pytest.raises(SystemExit) as e:
        main(["diagnose", "--model", TINY])  # missing --evidence
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["no-such-command"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def test_generate_writes_loadable_jsonl(tmp_path):
    out = str(tmp_path / "v.jsonl")
    assert main(["generate", "--model", TINY, "--n", "6", "--seed", "3", "--out", out]) == 0
    vs = load_vignettes(out)
    assert len(vs) == 6
    assert all(v.true_disease == "d1" for v in vs)


def test_generate_is_byte_deterministic(tmp_path):
    outs = []
    for name in ("a.jsonl", "b.jsonl"):
        out = str(tmp_path / name)
        assert (
            main(["generate", "--model", TINY, "--n", "5", "--seed", "9", "--out", out]) == 0
        )
        outs.append(Path(out).read_bytes())
    assert outs[0] == outs[1]


# ---------------------------------------------------------------------------
# benchmark
# ---------------------------------------------------------------------------


def test_benchmark_synthetic_round_trip(tmp_path):
    from cfdiag.benchmark import BenchmarkReport

    out = str(tmp_path / "rep.json")
    csv = str(tmp_path / "rep.csv")
    args = [
        "benchmark",
        "--risks", "3",
        "--diseases", "5",
        "--symptoms", "8",
        "--vignettes", "20",
        "--seed", "4",
        "--k-max", "5",
        "--out", out,
        "--csv", csv,
    ]
    assert main(args) == 0
    rep = BenchmarkReport.load(out)
    assert rep.n_vignettes == 20
    assert rep.k_max == 5
    assert rep.policy["model_source"] == "synthetic"
    assert Path(csv).read_text().splitlines()[0] == "measure,k,accuracy,ci_low,ci_high"
    # identical argv -> identical bytes
    out2 = str(tmp_path / "rep2.json")
    assert main(args[:-4] + ["--out", out2]) == 0
    assert Path(out).read_bytes() == Path(out2).read_bytes()


def test_benchmark_from_model_file(tmp_path, capsys):
    assert (
        main(["benchmark", "--model", TINY, "--vignettes", "5", "--seed", "2", "--k-max", "1"]) == 0
    )
    payload = json.loads(capsys.readouterr().out)
    assert payload["policy"]["model_source"] == "file"
    assert payload["n_scored"] == 5


# ---------------------------------------------------------------------------
# crosscheck
# ---------------------------------------------------------------------------


def test_crosscheck_reports_tiny_deviation(capsys):
    assert (
        main(["crosscheck", "--model", TINY, "--seed", "7", "--trials", "8",
              "--fail-above", "1e-9"])
        == 0
    )
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is True
    assert payload["scored"] == 8
    assert payload["max_deviation"]["overall"] < 1e-9
    assert payload["mc"] is None


def test_crosscheck_fail_threshold_exits_one(capsys):
    assert (
        main(["crosscheck", "--model", TINY, "--seed", "7", "--trials", "4",
              "--fail-above", "0"])
        == 1
    )
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is False


def test_crosscheck_mc_mode(capsys):
    assert (
        main(["crosscheck", "--model", TINY, "--seed", "1", "--trials", "2",
              "--mc-samples", "20000"])
        == 0
    )
    payload = json.loads(capsys.readouterr().out)
    assert payload["mc"]["samples"] == 20000
    assert payload["mc"]["max_z"] < 6.0
    assert payload["mc"]["cases"]
