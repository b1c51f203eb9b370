"""Vignette generation, rarity buckets, benchmark aggregation, desiderata."""

import numpy as np
import pytest

from cfdiag.benchmark import (
    BenchmarkReport,
    desiderata_report,
    evaluate_topk,
    wilson_interval,
)
from cfdiag.network import (
    DiseaseNode,
    Edge,
    Evidence,
    NoisyOrNetwork,
    RiskFactor,
    SymptomNode,
)
from cfdiag.randomnets import random_network
from cfdiag.vignettes import (
    DEFAULT_RARITY_THRESHOLDS,
    RARITY_LABELS,
    MaskingPolicy,
    Vignette,
    bucket_of,
    generate_vignettes,
    load_vignettes,
    rarity_bucket,
    save_vignettes,
)


@pytest.fixture(scope="module")
def corpus_net():
    rng = np.random.default_rng(6)
    return random_network(
        rng, n_risks=3, n_diseases=6, n_symptoms=10, ensure_disease_has_symptom=True
    )


# ---------------------------------------------------------------------------
# Vignettes
# ---------------------------------------------------------------------------


def test_generation_is_deterministic(corpus_net):
    a = generate_vignettes(corpus_net, 25, seed=5)
    b = generate_vignettes(corpus_net, 25, seed=5)
    assert [v.to_dict() for v in a] == [v.to_dict() for v in b]
    c = generate_vignettes(corpus_net, 25, seed=6)
    assert [v.to_dict() for v in a] != [v.to_dict() for v in c]


def test_every_vignette_presents_a_symptom(corpus_net):
    for v in generate_vignettes(corpus_net, 40, seed=1):
        assert v.positive
        assert v.true_disease in corpus_net.disease_by_id
        assert v.rarity in RARITY_LABELS


def test_reveal_all_policy_covers_everything(corpus_net):
    vs = generate_vignettes(
        corpus_net, 10, seed=2, policy=MaskingPolicy(reveal_all=True)
    )
    for v in vs:
        assert {r for r, _ in v.risks} == set(corpus_net.risk_ids)
        assert set(v.positive) | set(v.negative) == set(corpus_net.symptom_ids)
        assert not set(v.positive) & set(v.negative)


def test_jsonl_round_trip(corpus_net, tmp_path):
    vs = generate_vignettes(corpus_net, 15, seed=3)
    path = tmp_path / "corpus.jsonl"
    save_vignettes(vs, path)
    assert [v.to_dict() for v in load_vignettes(path)] == [v.to_dict() for v in vs]


def test_vignette_evidence_view(corpus_net):
    v = generate_vignettes(corpus_net, 1, seed=4)[0]
    ev = v.evidence()
    assert isinstance(ev, Evidence)
    assert ev.positive == v.positive and ev.negative == v.negative


def test_masking_policy_validation():
    with pytest.raises(ValueError):
        MaskingPolicy(risk_observe_prob=1.5)
    with pytest.raises(ValueError):
        MaskingPolicy(mean_negative_symptoms=-1)
    with pytest.raises(ValueError):
        MaskingPolicy(disease_weighting="magic")
    p = MaskingPolicy(reveal_all=True, disease_weighting="prevalence")
    assert MaskingPolicy.from_dict(p.to_dict()) == p


# ---------------------------------------------------------------------------
# Rarity
# ---------------------------------------------------------------------------


def test_bucket_thresholds_and_boundary_rule():
    assert bucket_of(0.5) == "very-common"
    assert bucket_of(0.01) == "very-common"  # boundary goes to commoner bucket
    assert bucket_of(0.0099) == "common"
    assert bucket_of(1e-3) == "common"
    assert bucket_of(5e-4) == "uncommon"
    assert bucket_of(1e-4) == "uncommon"
    assert bucket_of(5e-5) == "rare"
    assert bucket_of(1e-5) == "rare"
    assert bucket_of(9e-6) == "very-rare"
    assert bucket_of(0.0) == "very-rare"


def test_custom_thresholds():
    assert bucket_of(0.4, thresholds=(0.5, 0.3, 0.2, 0.1)) == "common"


def test_rarity_of_anchor_disease(tiny):
    # P(D = 1) = 0.3 with no risk factors to condition on.
    assert rarity_bucket(tiny, "d") == "very-common"


def test_rarity_conditions_on_risk_evidence():
    net = NoisyOrNetwork(
        risk_factors=(RiskFactor("r", 0.5),),
        diseases=(DiseaseNode("d", leak=0.9995, parents=(Edge("r", 0.01),)),),
        symptoms=(SymptomNode("s", leak=0.9, parents=(Edge("d", 0.5),)),),
    )
    # risk on: P(d) ~ 1 - 0.9995 * 0.01 ~ 0.99; risk off: 5e-4 (mid-bucket,
    # safely away from the threshold so float noise cannot flip the label).
    assert rarity_bucket(net, "d", risk_evidence=(("r", 1),)) == "very-common"
    assert rarity_bucket(net, "d", risk_evidence=(("r", 0),)) == "uncommon"
    assert rarity_bucket(net, "d", risk_evidence={"r": 0}) == "uncommon"  # mapping form


# ---------------------------------------------------------------------------
# Wilson intervals
# ---------------------------------------------------------------------------


def test_wilson_known_values():
    # For 8 successes in 10 at z = 1.96 the score interval works out to
    # ((0.99208 - 0.3136245) / 1.38416, (0.99208 + 0.3136245) / 1.38416).
    lo, hi = wilson_interval(8, 10)
    assert lo == pytest.approx(0.4901568467, abs=1e-9)
    assert hi == pytest.approx(0.9433190520, abs=1e-9)
    assert wilson_interval(0, 0) == (0.0, 1.0)
    lo0, hi0 = wilson_interval(0, 20)
    assert lo0 == 0.0 and 0 < hi0 < 0.2
    loN, hiN = wilson_interval(20, 20)
    assert hiN == 1.0 and 0.8 < loN < 1.0


def test_wilson_interval_contains_point_estimate():
    for s, n in ((3, 7), (0, 5), (5, 5), (49, 100)):
        lo, hi = wilson_interval(s, n)
        assert lo <= s / n <= hi


# ---------------------------------------------------------------------------
# Benchmark aggregation
# ---------------------------------------------------------------------------


def _tie_net():
    return NoisyOrNetwork(
        diseases=(
            DiseaseNode("a_poor", leak=0.9),
            DiseaseNode("b_rich", leak=0.5),
            DiseaseNode("cause", leak=0.6),
        ),
        symptoms=(SymptomNode("s", leak=0.95, parents=(Edge("cause", 0.3),)),),
    )


def _vignette(i, disease):
    return Vignette(
        id=f"v{i:05d}",
        true_disease=disease,
        risks=(),
        positive=("s",),
        negative=(),
        rarity="common",
        seed=0,
    )


def test_hand_counted_accuracies():
    # Sufficiency ranks the tie net ("cause", "b_rich", "a_poor") for the
    # only possible evidence, so three vignettes with those true diseases
    # land at ranks 1, 2, 3: accuracy 1/3, 2/3, 1 and mean rank 2.
    net = _tie_net()
    vs = [_vignette(0, "cause"), _vignette(1, "b_rich"), _vignette(2, "a_poor")]
    rep = evaluate_topk(net, vs, k_max=3, measures=("sufficiency",))
    out = rep.outcome_of("sufficiency")
    assert [p.accuracy for p in out.topk] == [
        pytest.approx(1 / 3),
        pytest.approx(2 / 3),
        pytest.approx(1.0),
    ]
    assert out.mean_rank == pytest.approx(2.0)
    assert rep.n_scored == 3 and rep.zero_likelihood_ids == ()


def test_full_k_accuracy_is_one(corpus_net):
    vs = generate_vignettes(corpus_net, 20, seed=7)
    rep = evaluate_topk(net=corpus_net, vignettes=vs, k_max=len(corpus_net.diseases))
    for m in rep.measures:
        assert m.topk[-1].accuracy == 1.0


def test_accuracy_curves_never_decrease(corpus_net):
    vs = generate_vignettes(corpus_net, 30, seed=8)
    rep = evaluate_topk(corpus_net, vs, k_max=6)
    for m in rep.measures:
        accs = [p.accuracy for p in m.topk]
        assert accs == sorted(accs)
        for p in m.topk:
            assert p.ci_low <= p.accuracy <= p.ci_high


def test_pairwise_counts_partition_the_corpus(corpus_net):
    vs = generate_vignettes(corpus_net, 30, seed=9)
    rep = evaluate_topk(corpus_net, vs, k_max=6)
    for pw in rep.pairwise:
        assert pw.wins + pw.draws + pw.losses == rep.n_scored
    names = {(pw.measure_a, pw.measure_b) for pw in rep.pairwise}
    assert names == {
        ("posterior", "sufficiency"),
        ("posterior", "disablement"),
        ("sufficiency", "disablement"),
    }


def test_strata_cover_scored_vignettes(corpus_net):
    vs = generate_vignettes(corpus_net, 30, seed=10)
    rep = evaluate_topk(corpus_net, vs, k_max=6)
    assert sum(s.n for s in rep.strata) == rep.n_scored
    for s in rep.strata:
        assert s.rarity in RARITY_LABELS
        for _, accs in s.accuracy:
            assert len(accs) == rep.k_max


def test_zero_likelihood_vignettes_reported_and_excluded():
    net = NoisyOrNetwork(
        diseases=(DiseaseNode("d", leak=0.7),),
        symptoms=(
            SymptomNode("s", leak=0.95, parents=(Edge("d", 0.4),)),
            SymptomNode("never", leak=1.0),
        ),
    )
    good = Vignette("ok", "d", (), ("s",), (), "common", 0)
    bad = Vignette("impossible", "d", (), ("never",), (), "common", 0)
    rep = evaluate_topk(net, [good, bad], k_max=1)
    assert rep.n_vignettes == 2 and rep.n_scored == 1
    assert rep.zero_likelihood_ids == ("impossible",)
    assert rep.outcome_of("posterior").accuracy_at(1) == 1.0


def test_per_vignette_k_mode(corpus_net):
    vs = generate_vignettes(corpus_net, 12, seed=11)
    ks = {v.id: (1 if i % 2 else len(corpus_net.diseases)) for i, v in enumerate(vs)}
    rep = evaluate_topk(corpus_net, vs, k_max=6, k_per_vignette=ks)
    for m in rep.measures:
        assert m.vignette_k_accuracy is not None
        assert 0.0 <= m.vignette_k_accuracy <= 1.0
    flat = evaluate_topk(corpus_net, vs, k_max=6, k_per_vignette=len(corpus_net.diseases))
    for m in flat.measures:
        assert m.vignette_k_accuracy == 1.0


def test_report_round_trips(corpus_net, tmp_path):
    vs = generate_vignettes(corpus_net, 15, seed=12)
    rep = evaluate_topk(corpus_net, vs, k_max=4, policy={"seed": 12})
    assert BenchmarkReport.from_json(rep.to_json()) == rep
    path = tmp_path / "report.json"
    rep.save(path)
    assert BenchmarkReport.load(path) == rep
    csv = rep.to_csv().splitlines()
    assert csv[0] == "measure,k,accuracy,ci_low,ci_high"
    assert len(csv) == 1 + 3 * 4  # three measures, four k values


# ---------------------------------------------------------------------------
# Desiderata report
# ---------------------------------------------------------------------------


def test_desiderata_hold_on_random_networks():
    rep = desiderata_report(trials=40, seed=13)
    assert rep.ok
    names = [c.name for c in rep.checks]
    assert names == [
        "causality-zero",
        "simplicity-bound",
        "consistency-at-zero",
        "posterior-recovery",
        "closed-vs-oracle",
    ]
    for c in rep.checks:
        assert c.cases > 0
        assert c.violations == 0
    assert rep.check("closed-vs-oracle").worst_deviation < 1e-9
    assert rep.check("causality-zero").worst_deviation == 0.0


def test_desiderata_without_oracle_is_faster_but_complete():
    rep = desiderata_report(trials=10, seed=14, oracle_check=False)
    assert rep.ok
    assert [c.name for c in rep.checks] == [
        "causality-zero",
        "simplicity-bound",
        "consistency-at-zero",
        "posterior-recovery",
    ]


def test_desiderata_validation():
    with pytest.raises(ValueError):
        desiderata_report(trials=0, seed=0)
