import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfdiag.errors import EvidenceError, RejectionLimitError
from cfdiag.network import (
    DiseaseNode,
    Edge,
    Evidence,
    NoisyOrNetwork,
    RiskFactor,
    SymptomNode,
    ancestral_sample,
    check_evidence,
    network_from_dict,
    network_to_dict,
    load_network,
    off_probability,
    save_network,
    validate_network,
)
from cfdiag.oracle import enumerate_joint
from cfdiag.randomnets import random_network

from conftest import small_net


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def test_valid_net_passes(tiny, two_disease):
    assert validate_network(tiny).ok
    assert validate_network(two_disease).ok


def test_zero_lambda_rejected_with_epsilon_hint():
    net = NoisyOrNetwork(
        diseases=(DiseaseNode("d", leak=0.5),),
        symptoms=(SymptomNode("s", leak=0.9, parents=(Edge("d", 0.0),)),),
    )
    report = validate_network(net)
    assert not report.ok
    assert [i.code for i in report.issues] == ["lambda-range"]
    assert "epsilon" in report.issues[0].message


def test_leak_zero_rejected():
    net = NoisyOrNetwork(diseases=(DiseaseNode("d", leak=0.0),))
    assert [i.code for i in validate_network(net).issues] == ["lambda-range"]


def test_lambda_one_allowed():
    net = NoisyOrNetwork(
        diseases=(DiseaseNode("d", leak=1.0),),
        symptoms=(SymptomNode("s", leak=1.0, parents=(Edge("d", 1.0),)),),
    )
    assert validate_network(net).ok


def test_prior_out_of_range():
    net = NoisyOrNetwork(risk_factors=(RiskFactor("r", 1.2),))
    assert [i.code for i in validate_network(net).issues] == ["prior-range"]


def test_layer_violation_symptom_parent_of_symptom():
    net = NoisyOrNetwork(
        diseases=(DiseaseNode("d", leak=0.5),),
        symptoms=(
            SymptomNode("s1", leak=0.9, parents=(Edge("d", 0.4),)),
            SymptomNode("s2", leak=0.9, parents=(Edge("s1", 0.4),)),
        ),
    )
    assert [i.code for i in validate_network(net).issues] == ["layer-violation"]


def test_risk_cannot_parent_symptom():
    net = NoisyOrNetwork(
        risk_factors=(RiskFactor("r", 0.1),),
        diseases=(DiseaseNode("d", leak=0.5),),
        symptoms=(SymptomNode("s", leak=0.9, parents=(Edge("r", 0.4),)),),
    )
    assert [i.code for i in validate_network(net).issues] == ["layer-violation"]


def test_dangling_edge():
    net = NoisyOrNetwork(
        diseases=(DiseaseNode("d", leak=0.5, parents=(Edge("ghost", 0.4),)),),
    )
    assert [i.code for i in validate_network(net).issues] == ["dangling-edge"]


def test_duplicate_ids_reported():
    net = NoisyOrNetwork(
        risk_factors=(RiskFactor("x", 0.1),),
        diseases=(DiseaseNode("x", leak=0.5),),
    )
    report = validate_network(net)
    assert [i.code for i in report.issues] == ["duplicate-id"]
    assert "risk" in report.issues[0].message and "disease" in report.issues[0].message


def test_duplicate_edge_reported():
    net = NoisyOrNetwork(
        risk_factors=(RiskFactor("r", 0.1),),
        diseases=(DiseaseNode("d", leak=0.5, parents=(Edge("r", 0.4), Edge("r", 0.6))),),
    )
    assert "duplicate-edge" in [i.code for i in validate_network(net).issues]


# ---------------------------------------------------------------------------
# CPT
# ---------------------------------------------------------------------------


def test_off_probability_tiny(tiny):
    assert off_probability(tiny, "d", {}) == pytest.approx(0.7, abs=0)
    assert off_probability(tiny, "s", {"d": 0}) == pytest.approx(0.95, abs=0)
    assert off_probability(tiny, "s", {"d": 1}) == pytest.approx(0.38, rel=1e-15)


def test_off_probability_all_parents_off_equals_leak(two_disease):
    assert off_probability(two_disease, "s1", {"d1": 0, "d2": 0}) == 0.9


def test_off_probability_requires_all_parents(two_disease):
    with pytest.raises(KeyError):
        off_probability(two_disease, "s1", {"d1": 1})


def test_off_probability_monotone_in_active_parents():
    rng = np.random.default_rng(7)
    for _ in range(50):
        net = small_net(rng)
        s = net.symptoms[-1]
        if not s.parents:
            continue
        base = {e.parent: 0 for e in s.parents}
        prev = off_probability(net, s.id, base)
        for e in s.parents:
            base[e.parent] = 1
            cur = off_probability(net, s.id, base)
            assert cur <= prev + 1e-15
            prev = cur


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_round_trip_dict(two_disease):
    assert network_from_dict(network_to_dict(two_disease)) == two_disease


def test_round_trip_random_nets():
    rng = np.random.default_rng(11)
    for _ in range(25):
        net = random_network(rng, 3, 4, 5)
        assert network_from_dict(network_to_dict(net)) == net


def test_round_trip_file(tmp_path, two_disease):
    path = str(tmp_path / "net.json")
    save_network(two_disease, path)
    assert load_network(path) == two_disease


# ---------------------------------------------------------------------------
# evidence
# ---------------------------------------------------------------------------


def test_evidence_canonical_order():
    ev = Evidence(risks=(("b", 1), ("a", 0)), positive=("z", "y"), negative=("x",))
    assert ev.risks == (("a", 0), ("b", 1))
    assert ev.positive == ("y", "z")
    assert ev.to_dict() == {"risks": {"a": 0, "b": 1}, "positive": ["y", "z"], "negative": ["x"]}
    assert Evidence.from_dict(ev.to_dict()) == ev


def test_check_evidence_overlap(tiny):
    with pytest.raises(EvidenceError, match="both positive and negative"):
        check_evidence(tiny, Evidence(positive=("s",), negative=("s",)))


def test_check_evidence_wrong_layer(tiny):
    with pytest.raises(EvidenceError, match="'d'"):
        check_evidence(tiny, Evidence(positive=("d",)))
    with pytest.raises(EvidenceError, match="unknown"):
        check_evidence(tiny, Evidence(risks=(("nope", 1),)))


def test_check_evidence_ok(two_disease):
    check_evidence(two_disease, Evidence(risks=(("r", 1),), positive=("s1",), negative=("s2",)))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def test_sampling_deterministic(two_disease):
    a = ancestral_sample(two_disease, np.random.default_rng(5))
    b = ancestral_sample(two_disease, np.random.default_rng(5))
    assert a == b


def test_sampling_force_disease(two_disease):
    rng = np.random.default_rng(3)
    for _ in range(50):
        sample = ancestral_sample(two_disease, rng, force_disease="d2")
        assert dict(sample.diseases)["d2"] == 1


def test_sampling_risk_override(two_disease):
    rng = np.random.default_rng(4)
    for _ in range(20):
        sample = ancestral_sample(two_disease, rng, risk_overrides={"r": 1})
        assert dict(sample.risks)["r"] == 1


def test_sampling_prior_one_risk_always_on():
    net = NoisyOrNetwork(
        risk_factors=(RiskFactor("r", 1.0),),
        diseases=(DiseaseNode("d", leak=0.5, parents=(Edge("r", 0.5),)),),
    )
    rng = np.random.default_rng(0)
    assert all(
        dict(ancestral_sample(net, rng).risks)["r"] == 1 for _ in range(30)
    )


def test_sampling_rejection_cap():
    # leak 1.0 and no parents: the disease can never activate.
    net = NoisyOrNetwork(diseases=(DiseaseNode("d", leak=1.0),))
    with pytest.raises(RejectionLimitError):
        ancestral_sample(net, np.random.default_rng(0), force_disease="d", max_rejects=50)


def test_sampling_matches_enumeration(tiny):
    """Empirical assignment frequencies agree with the exact joint (4-sigma)."""
    rng = np.random.default_rng(12)
    n = 40_000
    counts = {(d, s): 0 for d in (0, 1) for s in (0, 1)}
    for _ in range(n):
        sample = ancestral_sample(tiny, rng)
        counts[(dict(sample.diseases)["d"], dict(sample.symptoms)["s"])] += 1
    table = enumerate_joint(tiny)
    for (d, s), c in counts.items():
        p = table.prob_of({"d": d, "s": s})
        sigma = math.sqrt(p * (1 - p) / n)
        assert abs(c / n - p) < 4 * sigma + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_is_identity_property(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, 2, 2, 2)
    assert network_from_dict(network_to_dict(net)) == net
