"""Random network and evidence generators for tests, benchmarks, and crosschecks.

Two generators: `random_network` draws structure and parameters from plain
ranges and is what the correctness sweeps use; `benchmark_network` is an
opinionated synthetic profile (rare-ish diseases, low-leak symptoms, wide
spread of risk-conditional disease probabilities) meant to produce vignette
corpora whose rarity buckets are all populated.
"""

from __future__ import annotations

import numpy as np

from .network import DiseaseNode, Edge, Evidence, NoisyOrNetwork, RiskFactor, SymptomNode

__all__ = ["random_network", "random_evidence", "benchmark_network"]


def _ids(prefix: str, n: int) -> list[str]:
    w = max(1, len(str(max(n - 1, 0))))
    return [f"{prefix}{i:0{w}d}" for i in range(n)]


def _uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(lo + (hi - lo) * rng.random())


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(np.exp(_uniform(rng, np.log(lo), np.log(hi))))


def random_network(
    rng: np.random.Generator,
    n_risks: int,
    n_diseases: int,
    n_symptoms: int,
    *,
    risk_edge_prob: float = 0.5,
    symptom_edge_prob: float = 0.6,
    lam_range: tuple[float, float] = (0.05, 0.99),
    prior_range: tuple[float, float] = (0.05, 0.95),
    leak_range: tuple[float, float] | None = None,
    ensure_disease_has_symptom: bool = False,
) -> NoisyOrNetwork:
    """Draw a three-layer net with independent edge coin-flips.

    Leaks default to the same range as edge failure probabilities. With
    ``ensure_disease_has_symptom`` every disease ends up with at least one
    symptom child (needed when the net will generate vignettes, where a
    childless disease could never produce positive evidence).
    """
    leaks = leak_range if leak_range is not None else lam_range
    risk_ids = _ids("r", n_risks)
    disease_ids = _ids("d", n_diseases)
    symptom_ids = _ids("s", n_symptoms)

    risks = tuple(
        RiskFactor(rid, _uniform(rng, *prior_range)) for rid in risk_ids
    )
    diseases = []
    for did in disease_ids:
        parents = tuple(
            Edge(rid, _uniform(rng, *lam_range))
            for rid in risk_ids
            if rng.random() < risk_edge_prob
        )
        diseases.append(DiseaseNode(did, _uniform(rng, *leaks), parents))
    symptoms = []
    child_count = {did: 0 for did in disease_ids}
    for sid in symptom_ids:
        parents = []
        for did in disease_ids:
            if rng.random() < symptom_edge_prob:
                parents.append(Edge(did, _uniform(rng, *lam_range)))
                child_count[did] += 1
        symptoms.append(SymptomNode(sid, _uniform(rng, *leaks), tuple(parents)))

    if ensure_disease_has_symptom and symptoms:
        for j, did in enumerate(disease_ids):
            if child_count[did] == 0:
                k = int(rng.integers(len(symptoms)))
                s = symptoms[k]
                symptoms[k] = SymptomNode(
                    s.id, s.leak, s.parents + (Edge(did, _uniform(rng, *lam_range)),)
                )
    return NoisyOrNetwork(risks, tuple(diseases), tuple(symptoms))


def random_evidence(
    net: NoisyOrNetwork,
    rng: np.random.Generator,
    *,
    risk_obs_prob: float = 0.5,
    symptom_obs_prob: float = 0.7,
    positive_prob: float = 0.5,
) -> Evidence:
    """Independent coin-flip evidence; may be arbitrarily unlikely but, because
    every failure probability is strictly below 1 in generated nets, never has
    probability exactly zero."""
    risks = tuple(
        (r.id, int(rng.random() < 0.5))
        for r in net.risk_factors
        if rng.random() < risk_obs_prob
    )
    positive, negative = [], []
    for s in net.symptoms:
        if rng.random() < symptom_obs_prob:
            (positive if rng.random() < positive_prob else negative).append(s.id)
    return Evidence(risks=risks, positive=tuple(positive), negative=tuple(negative))


def benchmark_network(
    rng: np.random.Generator,
    *,
    n_risks: int = 10,
    n_diseases: int = 30,
    n_symptoms: int = 50,
) -> NoisyOrNetwork:
    """Synthetic diagnostic profile for vignette benchmarks.

    Diseases are rare (spontaneous activation drawn log-uniformly between
    1e-6 and 5e-2, risk factors raising it only moderately, so
    risk-conditional probabilities spread across every rarity bucket),
    symptoms rarely fire spontaneously, and every disease has two to four
    symptom children so a forced disease can always show something. The
    parameters are chosen so a sampled case presents with a handful of
    positive symptoms — the regime real diagnostic vignettes live in, and
    the one where the per-positive-symptom exponential of exact inference
    stays cheap.
    """
    risk_ids = _ids("r", n_risks)
    disease_ids = _ids("d", n_diseases)
    symptom_ids = _ids("s", n_symptoms)

    risks = tuple(RiskFactor(rid, _uniform(rng, 0.05, 0.25)) for rid in risk_ids)

    diseases = []
    for did in disease_ids:
        n_pa = int(rng.integers(1, 4)) if n_risks else 0
        pa = rng.choice(n_risks, size=min(n_pa, n_risks), replace=False) if n_risks else []
        parents = tuple(Edge(risk_ids[int(i)], _uniform(rng, 0.75, 0.98)) for i in sorted(pa))
        leak = 1.0 - _log_uniform(rng, 1e-6, 5e-2)
        diseases.append(DiseaseNode(did, leak, parents))

    children: dict[str, list[tuple[str, float]]] = {sid: [] for sid in symptom_ids}
    for did in disease_ids:
        n_ch = int(rng.integers(2, 5))
        ch = rng.choice(n_symptoms, size=min(n_ch, n_symptoms), replace=False)
        for i in ch:
            children[symptom_ids[int(i)]].append((did, _uniform(rng, 0.2, 0.8)))
    symptoms = tuple(
        SymptomNode(
            sid,
            1.0 - _log_uniform(rng, 1e-4, 2e-2),
            tuple(Edge(did, lam) for did, lam in sorted(children[sid])),
        )
        for sid in symptom_ids
    )
    return NoisyOrNetwork(risks, tuple(diseases), symptoms)
