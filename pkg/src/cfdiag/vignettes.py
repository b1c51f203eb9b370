"""Synthetic diagnostic vignettes: ground-truth cases for ranking benchmarks.

A vignette is one simulated patient: a designated *true disease*, the
evidence a clinician would see (observed risk factors, symptoms reported
present, symptoms reported absent), and a rarity label for stratified
reporting. Generation picks the true disease first (uniformly or weighted by
its marginal prevalence), ancestrally samples a full world state with that
disease forced on, and then masks the state down to realistic partial
evidence: every on-symptom is reported (patients mention what hurts), only a
few off-symptoms are recorded (history taking is not exhaustive), and each
risk factor is observed with fixed probability.

Rarity is the model-conditional prevalence P(disease = 1 | observed risks)
bucketed on fixed thresholds; a value exactly on a threshold goes to the
more common bucket (closed boundaries on the common side).

Everything is driven by one integer seed; the same seed always yields the
identical vignette list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import RejectionLimitError
from .inference import InferenceSettings, joint_off_marginal
from .network import Evidence, NoisyOrNetwork, ancestral_sample

__all__ = [
    "RARITY_LABELS",
    "DEFAULT_RARITY_THRESHOLDS",
    "MaskingPolicy",
    "Vignette",
    "bucket_of",
    "rarity_bucket",
    "generate_vignettes",
    "save_vignettes",
    "load_vignettes",
]

RARITY_LABELS = ("very-common", "common", "uncommon", "rare", "very-rare")
DEFAULT_RARITY_THRESHOLDS = (0.01, 1e-3, 1e-4, 1e-5)

_SEED_PURPOSE = 0x5649  # keeps this module's streams distinct per user seed


@dataclass(frozen=True)
class MaskingPolicy:
    """How much of a sampled world state becomes visible evidence.

    ``risk_observe_prob``: each risk factor is independently observed with
    this probability. ``mean_negative_symptoms``: expected number of
    off-symptoms reported absent (each off-symptom revealed with probability
    ``min(1, mean/n_off)``). ``reveal_all`` overrides both: all risks
    observed, every off-symptom reported. ``disease_weighting`` picks the
    true disease "uniform"-ly over diseases or proportional to its marginal
    prevalence ("prevalence").
    """

    risk_observe_prob: float = 0.5
    mean_negative_symptoms: float = 2.0
    reveal_all: bool = False
    disease_weighting: str = "uniform"

    def __post_init__(self) -> None:
        if not 0.0 <= self.risk_observe_prob <= 1.0:
            raise ValueError("risk_observe_prob must be in [0, 1]")
        if self.mean_negative_symptoms < 0.0:
            raise ValueError("mean_negative_symptoms must be >= 0")
        if self.disease_weighting not in ("uniform", "prevalence"):
            raise ValueError("disease_weighting must be 'uniform' or 'prevalence'")

    def to_dict(self) -> dict:
        return {
            "risk_observe_prob": self.risk_observe_prob,
            "mean_negative_symptoms": self.mean_negative_symptoms,
            "reveal_all": self.reveal_all,
            "disease_weighting": self.disease_weighting,
        }

    @staticmethod
    def from_dict(d: Mapping) -> "MaskingPolicy":
        return MaskingPolicy(
            risk_observe_prob=float(d.get("risk_observe_prob", 0.5)),
            mean_negative_symptoms=float(d.get("mean_negative_symptoms", 2.0)),
            reveal_all=bool(d.get("reveal_all", False)),
            disease_weighting=str(d.get("disease_weighting", "uniform")),
        )


@dataclass(frozen=True)
class Vignette:
    """One simulated case: hidden truth plus the visible evidence."""

    id: str
    true_disease: str
    risks: tuple[tuple[str, int], ...]
    positive: tuple[str, ...]
    negative: tuple[str, ...]
    rarity: str
    seed: int

    def evidence(self) -> Evidence:
        return Evidence(risks=self.risks, positive=self.positive, negative=self.negative)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "true_disease": self.true_disease,
            "risks": {k: v for k, v in self.risks},
            "positive": list(self.positive),
            "negative": list(self.negative),
            "rarity": self.rarity,
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(d: Mapping) -> "Vignette":
        return Vignette(
            id=str(d["id"]),
            true_disease=str(d["true_disease"]),
            risks=tuple(sorted((str(k), int(v)) for k, v in dict(d["risks"]).items())),
            positive=tuple(sorted(str(s) for s in d["positive"])),
            negative=tuple(sorted(str(s) for s in d["negative"])),
            rarity=str(d["rarity"]),
            seed=int(d["seed"]),
        )


# ---------------------------------------------------------------------------
# Rarity
# ---------------------------------------------------------------------------


def bucket_of(
    prior: float, thresholds: Sequence[float] = DEFAULT_RARITY_THRESHOLDS
) -> str:
    """Label for a prevalence value; boundary values go to the commoner bucket."""
    if len(thresholds) != len(RARITY_LABELS) - 1:
        raise ValueError(
            f"expected {len(RARITY_LABELS) - 1} thresholds, got {len(thresholds)}"
        )
    for label, t in zip(RARITY_LABELS, thresholds):
        if prior >= t:
            return label
    return RARITY_LABELS[-1]


def rarity_bucket(
    net: NoisyOrNetwork,
    disease: str,
    risk_evidence: Mapping[str, int] | Iterable[tuple[str, int]] | None = None,
    *,
    thresholds: Sequence[float] = DEFAULT_RARITY_THRESHOLDS,
    settings: InferenceSettings | None = None,
) -> str:
    """Bucket of P(disease = 1 | observed risks) under the model."""
    prior = joint_off_marginal(
        net, (), target_disease=disease, risk_evidence=risk_evidence, settings=settings
    )
    return bucket_of(prior, thresholds)


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


def _disease_weights(
    net: NoisyOrNetwork, policy: MaskingPolicy, settings: InferenceSettings | None
) -> np.ndarray:
    n = len(net.diseases)
    if policy.disease_weighting == "uniform":
        return np.full(n, 1.0 / n)
    prev = np.array(
        [
            joint_off_marginal(net, (), target_disease=d, settings=settings)
            for d in net.disease_ids
        ]
    )
    total = prev.sum()
    if total <= 0.0:
        raise ValueError("all diseases have zero prevalence; cannot weight by it")
    return prev / total


def generate_vignettes(
    net: NoisyOrNetwork,
    n: int,
    seed: int,
    *,
    policy: MaskingPolicy | None = None,
    settings: InferenceSettings | None = None,
    max_attempts: int = 1000,
) -> list[Vignette]:
    """Generate ``n`` vignettes; fully determined by ``seed`` and ``policy``.

    For each vignette the true disease is drawn per policy, the world is
    ancestrally sampled with that disease forced on, and sampling repeats
    until at least one symptom is on (a case with no presenting symptom is
    not a usable vignette). A disease that cannot produce any on-symptom
    within ``max_attempts`` resamples raises RejectionLimitError.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not net.diseases or not net.symptoms:
        raise ValueError("network needs at least one disease and one symptom")
    policy = policy or MaskingPolicy()
    rng = np.random.default_rng(np.random.SeedSequence([seed, _SEED_PURPOSE]))
    weights = _disease_weights(net, policy, settings)
    out: list[Vignette] = []
    for i in range(n):
        disease = net.disease_ids[int(rng.choice(len(net.disease_ids), p=weights))]
        sample = None
        for _ in range(max_attempts):
            cand = ancestral_sample(net, rng, force_disease=disease)
            if any(v for _, v in cand.symptoms):
                sample = cand
                break
        if sample is None:
            raise RejectionLimitError(
                f"disease {disease!r} produced no on-symptom in {max_attempts} samples"
            )
        positive = tuple(sid for sid, v in sample.symptoms if v)
        off = [sid for sid, v in sample.symptoms if not v]
        if policy.reveal_all:
            observed_risks = tuple(sample.risks)
            negative = tuple(off)
        else:
            observed_risks = tuple(
                (rid, v) for rid, v in sample.risks if rng.random() < policy.risk_observe_prob
            )
            reveal_p = min(1.0, policy.mean_negative_symptoms / len(off)) if off else 0.0
            negative = tuple(sid for sid in off if rng.random() < reveal_p)
        rarity = rarity_bucket(
            net, disease, dict(observed_risks), settings=settings
        )
        out.append(
            Vignette(
                id=f"v{i:05d}",
                true_disease=disease,
                risks=observed_risks,
                positive=positive,
                negative=negative,
                rarity=rarity,
                seed=seed,
            )
        )
    return out


# ---------------------------------------------------------------------------
# JSON-lines I/O
# ---------------------------------------------------------------------------


def save_vignettes(vignettes: Iterable[Vignette], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in vignettes:
            fh.write(json.dumps(v.to_dict(), sort_keys=True) + "\n")


def load_vignettes(path: str | Path) -> list[Vignette]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(Vignette.from_dict(json.loads(line)))
    return out
