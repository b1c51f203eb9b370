"""Twin-network construction and its agreement with latent-space abduction."""

import numpy as np
import pytest

from cfdiag.errors import ZeroLikelihoodError
from cfdiag.network import DiseaseNode, Edge, Evidence, NoisyOrNetwork, SymptomNode
from cfdiag.oracle import (
    CounterfactualIntervention,
    counterfactual_query,
    disablement_intervention,
    sufficiency_intervention,
)
from cfdiag.twin import build_twin_network, twin_query
from conftest import small_net


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------


def test_risks_always_merge_diseases_split_iff_intervened(two_disease):
    tw = build_twin_network(two_disease, disablement_intervention("d1"))
    assert tw.merged_risks == ("r",)
    assert tw.split_diseases == ("d1",)
    assert tw.merged_diseases == ("d2",)
    # s1 has the intervened parent d1 -> split; s2 (only d2) stays merged.
    assert tw.split_symptoms == ("s1",)
    assert tw.merged_symptoms == ("s2",)
    assert tw.pruned_symptoms == ()


def test_disabled_leak_splits_the_symptom(two_disease):
    iv = CounterfactualIntervention(disabled_leaks=("s2",))
    tw = build_twin_network(two_disease, iv)
    assert tw.split_diseases == ()
    assert "s2" in tw.split_symptoms  # leak mechanism differs across worlds
    assert "s1" in tw.merged_symptoms


def test_unevidenced_symptoms_prune_when_evidence_given(two_disease):
    ev = Evidence(positive=("s1",))
    tw = build_twin_network(two_disease, disablement_intervention("d1"), evidence=ev)
    assert tw.pruned_symptoms == ("s2",)
    assert "s2" not in tw.split_symptoms + tw.merged_symptoms


def test_latent_scopes(two_disease):
    ev = Evidence(positive=("s1",))
    tw = build_twin_network(
        two_disease, sufficiency_intervention(two_disease, ev, "d1"), evidence=ev
    )
    scopes = {(l.child, l.kind): l.scope for l in tw.latents}
    # s1's leak noise is disabled only in the counterfactual world, so that
    # latent belongs to the factual world alone; edge noises stay shared.
    assert scopes[("s1", "leak")] == "factual-only"
    assert scopes[("s1", "edge")] == "shared"


def test_empty_intervention_merges_everything(two_disease):
    tw = build_twin_network(two_disease, CounterfactualIntervention())
    assert tw.split_diseases == () and tw.split_symptoms == ()
    assert set(tw.merged_diseases) == set(two_disease.disease_ids)


def test_unknown_intervention_ids_rejected(two_disease):
    with pytest.raises(ValueError):
        build_twin_network(
            two_disease, CounterfactualIntervention(diseases_off=("zz",))
        )
    with pytest.raises(ValueError):
        build_twin_network(
            two_disease, CounterfactualIntervention(disabled_leaks=("zz",))
        )


def test_dot_rendering_marks_both_worlds(two_disease):
    tw = build_twin_network(two_disease, disablement_intervention("d1"))
    dot = tw.to_dot()
    assert dot.startswith("digraph twin {")
    assert '"d1*"' in dot  # counterfactual copy present
    assert "d1* = 0" in dot  # pinned by the intervention
    assert '"d2*"' not in dot  # merged disease has a single node
    assert '"r" -> "d1"' in dot


# ---------------------------------------------------------------------------
# Distribution fidelity
# ---------------------------------------------------------------------------


def _check_against_latent_oracle(net, ev, iv, tol=1e-12):
    twin = twin_query(net, ev, iv)
    latent = counterfactual_query(net, ev, iv, method="latent")
    assert twin.symptoms == latent.symptoms
    for states, p in twin.as_dict().items():
        assert p == pytest.approx(latent.as_dict()[states], abs=tol)


def test_twin_equals_latent_abduction_on_anchor(two_disease):
    ev = Evidence(positive=("s1",), negative=("s2",))
    for iv in (
        disablement_intervention("d1"),
        disablement_intervention("d2"),
        sufficiency_intervention(two_disease, ev, "d1"),
        CounterfactualIntervention(),
    ):
        _check_against_latent_oracle(two_disease, ev, iv)


def test_twin_equals_latent_abduction_on_random_nets():
    rng = np.random.default_rng(41)
    checked = 0
    while checked < 8:
        net = small_net(rng)
        ev = _usable_evidence(net, rng)
        if ev is None:
            continue
        d = net.disease_ids[int(rng.integers(len(net.disease_ids)))]
        for iv in (
            disablement_intervention(d),
            sufficiency_intervention(net, ev, d),
        ):
            _check_against_latent_oracle(net, ev, iv)
        checked += 1


def _usable_evidence(net, rng):
    from cfdiag.inference import walk_evidence
    from cfdiag.randomnets import random_evidence

    for _ in range(20):
        ev = random_evidence(net, rng)
        if ev.positive and not walk_evidence(net, ev).zero_likelihood():
            return ev
    return None


def test_removing_causes_never_turns_a_symptom_on(two_disease):
    # Under a disease-off intervention the counterfactual symptom state is
    # pointwise <= the factual one, so (factual off, counterfactual on) has
    # probability exactly zero.
    ev = Evidence(positive=("s1",), negative=("s2",))
    dist = twin_query(two_disease, ev, disablement_intervention("d2"))
    for states, p in dist.as_dict().items():
        s2_cf = dict(zip(dist.symptoms, states))["s2"]
        if s2_cf == 1:  # factual s2 is 0 by the evidence
            assert p == 0.0


def test_empty_intervention_reproduces_evidence(two_disease):
    ev = Evidence(positive=("s1",), negative=("s2",))
    dist = twin_query(two_disease, ev, CounterfactualIntervention())
    want = {s: (1 if s in ev.positive else 0) for s in ("s1", "s2")}
    assert dist.prob_of(want) == pytest.approx(1.0, abs=1e-12)


def test_twin_query_zero_likelihood(two_disease):
    net = NoisyOrNetwork(
        risk_factors=two_disease.risk_factors,
        diseases=two_disease.diseases,
        symptoms=two_disease.symptoms + (SymptomNode("never", leak=1.0),),
    )
    with pytest.raises(ZeroLikelihoodError):
        twin_query(net, Evidence(positive=("never",)), disablement_intervention("d1"))


def test_query_subset(two_disease):
    ev = Evidence(positive=("s1",), negative=("s2",))
    full = twin_query(two_disease, ev, disablement_intervention("d1"))
    only = twin_query(
        two_disease, ev, disablement_intervention("d1"), query_symptoms=("s1",)
    )
    assert only.symptoms == ("s1",)
    assert only.marginal_one("s1") == pytest.approx(
        full.marginal_one("s1"), abs=1e-12
    )
