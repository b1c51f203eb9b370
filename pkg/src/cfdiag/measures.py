"""Counterfactual disease-ranking measures.

Two scores rank diseases by causal involvement rather than mere association:

* **Expected sufficiency** of disease k: the expected number of positively
  evidenced symptoms that would *still be on* in a counterfactual world where
  every other disease is switched off and the positive symptoms' leak causes
  are disabled — how much of the presentation k alone would sustain.
* **Expected disablement** of disease k: the expected number of positively
  evidenced symptoms that would *switch off* if k were cured — how much of
  the presentation k is necessary for.

Both expectations reduce to closed forms on the same signed subset sum that
computes the evidence likelihood: each inclusion-exclusion term gains one
per-disease correction factor (a sum of ``1 - lam`` over positive symptoms
outside the subset for sufficiency, of ``1 - 1/lam`` over symptoms inside it
for disablement, with ``lam = 1`` for non-children making both vanish on
diseases that cannot cause any evidenced symptom). One walk therefore yields
the likelihood, every posterior, and both measures for every disease
simultaneously; ranking many diseases costs the same as scoring one.

Replacing either correction factor by the constant 1 must reproduce the plain
posterior exactly; ``unit_corrections=True`` exposes that as a runtime
diagnostic of the correction plumbing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ZeroLikelihoodError
from .inference import InferenceSettings, WalkResult, bounded_value, walk_evidence
from .network import Evidence, NoisyOrNetwork

__all__ = [
    "MEASURE_KINDS",
    "MeasureValue",
    "TieNote",
    "DiagnosisRanking",
    "expected_sufficiency",
    "expected_disablement",
    "rank_diseases",
    "rank_all_measures",
]

MEASURE_KINDS = ("posterior", "sufficiency", "disablement")


@dataclass(frozen=True)
class MeasureValue:
    """One disease's score under one measure kind."""

    disease: str
    kind: str
    value: float

    def to_dict(self) -> dict:
        return {"disease": self.disease, "kind": self.kind, "value": self.value}

    @staticmethod
    def from_dict(d: Mapping) -> "MeasureValue":
        return MeasureValue(str(d["disease"]), str(d["kind"]), float(d["value"]))


@dataclass(frozen=True)
class TieNote:
    """Record of one adjacent ranking tie and the key that resolved it."""

    ahead: str
    behind: str
    resolved_by: str  # "posterior" or "id"

    def to_dict(self) -> dict:
        return {"ahead": self.ahead, "behind": self.behind, "resolved_by": self.resolved_by}

    @staticmethod
    def from_dict(d: Mapping) -> "TieNote":
        return TieNote(str(d["ahead"]), str(d["behind"]), str(d["resolved_by"]))


@dataclass(frozen=True)
class DiagnosisRanking:
    """All diseases ordered by one measure, best first.

    ``entries[i]`` and ``posteriors[i]`` are aligned. Ties on the measure
    value are broken by posterior (descending), then by disease id
    (ascending); every adjacent equal-value pair is recorded in ``ties`` with
    the key that decided it, so downstream consumers can see where the
    ordering was not determined by the measure itself.
    """

    measure: str
    entries: tuple[MeasureValue, ...]
    posteriors: tuple[float, ...]
    ties: tuple[TieNote, ...]
    likelihood: float

    def disease_order(self) -> tuple[str, ...]:
        return tuple(e.disease for e in self.entries)

    def position_of(self, disease: str) -> int:
        """1-based rank of ``disease``; raises ValueError if absent."""
        for i, e in enumerate(self.entries):
            if e.disease == disease:
                return i + 1
        raise ValueError(f"disease {disease!r} not in ranking")

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "likelihood": self.likelihood,
            "entries": [
                {**e.to_dict(), "posterior": p}
                for e, p in zip(self.entries, self.posteriors)
            ],
            "ties": [t.to_dict() for t in self.ties],
        }

    @staticmethod
    def from_dict(d: Mapping) -> "DiagnosisRanking":
        entries = tuple(
            MeasureValue(str(e["disease"]), str(e["kind"]), float(e["value"]))
            for e in d["entries"]
        )
        posteriors = tuple(float(e["posterior"]) for e in d["entries"])
        ties = tuple(TieNote.from_dict(t) for t in d["ties"])
        return DiagnosisRanking(
            measure=str(d["measure"]),
            entries=entries,
            posteriors=posteriors,
            ties=ties,
            likelihood=float(d["likelihood"]),
        )


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------


def _positive_children_count(net: NoisyOrNetwork, disease: str, positive: Iterable[str]) -> int:
    """|S_+ ∩ children(disease)| — the exact upper bound of both measures."""
    n = 0
    for sid in positive:
        if disease in net.symptom_by_id[sid].lam_by_parent:
            n += 1
    return n


def _measure_from_walk(
    net: NoisyOrNetwork,
    res: WalkResult,
    k: int,
    kind: str,
    unit_corrections: bool,
) -> float:
    if res.zero_likelihood():
        raise ZeroLikelihoodError(
            "evidence has zero probability under this network; measures undefined"
        )
    disease = res.disease_ids[k]
    if kind == "posterior":
        num = res.posterior_numerators[k]
        hi = 1.0
    elif kind == "sufficiency":
        num = res.sufficiency_numerators[k]
        hi = float(_positive_children_count(net, disease, res.positive))
    elif kind == "disablement":
        num = res.disablement_numerators[k]
        hi = float(_positive_children_count(net, disease, res.positive))
    else:
        raise ValueError(f"unknown measure kind {kind!r}; expected one of {MEASURE_KINDS}")
    if unit_corrections and kind != "posterior":
        hi = 1.0  # value collapses to the posterior by construction
    value = num.ratio_to(res.likelihood)
    return bounded_value(value, 0.0, hi, f"{kind} of {disease!r}")


def expected_sufficiency(
    net: NoisyOrNetwork,
    evidence: Evidence,
    disease: str,
    *,
    settings: InferenceSettings | None = None,
    unit_corrections: bool = False,
) -> MeasureValue:
    """Closed-form expected sufficiency of ``disease`` given the evidence."""
    res = walk_evidence(net, evidence, settings=settings, unit_corrections=unit_corrections)
    value = _measure_from_walk(net, res, res.index_of(disease), "sufficiency", unit_corrections)
    return MeasureValue(disease, "sufficiency", value)


def expected_disablement(
    net: NoisyOrNetwork,
    evidence: Evidence,
    disease: str,
    *,
    settings: InferenceSettings | None = None,
    unit_corrections: bool = False,
) -> MeasureValue:
    """Closed-form expected disablement of ``disease`` given the evidence."""
    res = walk_evidence(net, evidence, settings=settings, unit_corrections=unit_corrections)
    value = _measure_from_walk(net, res, res.index_of(disease), "disablement", unit_corrections)
    return MeasureValue(disease, "disablement", value)


# ---------------------------------------------------------------------------
# Ranking
# ---------------------------------------------------------------------------


def _ranking_from_walk(
    net: NoisyOrNetwork, res: WalkResult, measure: str
) -> DiagnosisRanking:
    n = len(res.disease_ids)
    posteriors = [
        bounded_value(
            res.posterior_numerators[k].ratio_to(res.likelihood),
            0.0,
            1.0,
            f"posterior of {res.disease_ids[k]!r}",
        )
        for k in range(n)
    ]
    if measure == "posterior":
        values = list(posteriors)
    else:
        values = [_measure_from_walk(net, res, k, measure, False) for k in range(n)]
    order = sorted(
        range(n), key=lambda k: (-values[k], -posteriors[k], res.disease_ids[k])
    )
    ties = []
    for a, b in zip(order, order[1:]):
        if values[a] == values[b]:
            resolved = "posterior" if posteriors[a] != posteriors[b] else "id"
            ties.append(TieNote(res.disease_ids[a], res.disease_ids[b], resolved))
    likelihood = min(1.0, max(0.0, res.likelihood.to_float()))
    return DiagnosisRanking(
        measure=measure,
        entries=tuple(
            MeasureValue(res.disease_ids[k], measure, values[k]) for k in order
        ),
        posteriors=tuple(posteriors[k] for k in order),
        ties=tuple(ties),
        likelihood=likelihood,
    )


def rank_diseases(
    net: NoisyOrNetwork,
    evidence: Evidence,
    measure: str = "sufficiency",
    *,
    settings: InferenceSettings | None = None,
) -> DiagnosisRanking:
    """Score every disease with ``measure`` and sort best-first.

    Raises ZeroLikelihoodError when the evidence has zero probability (no
    ranking is meaningful then) and ValueError for an unknown measure kind.
    """
    if measure not in MEASURE_KINDS:
        raise ValueError(f"unknown measure kind {measure!r}; expected one of {MEASURE_KINDS}")
    res = walk_evidence(net, evidence, settings=settings)
    if res.zero_likelihood():
        raise ZeroLikelihoodError(
            "evidence has zero probability under this network; ranking undefined"
        )
    return _ranking_from_walk(net, res, measure)


def rank_all_measures(
    net: NoisyOrNetwork,
    evidence: Evidence,
    *,
    measures: tuple[str, ...] = MEASURE_KINDS,
    settings: InferenceSettings | None = None,
) -> dict[str, DiagnosisRanking]:
    """Rankings for several measures from a single subset walk.

    The walk dominates the cost of ranking, so evaluating a vignette under
    all three measures this way costs the same as under one.
    """
    for m in measures:
        if m not in MEASURE_KINDS:
            raise ValueError(f"unknown measure kind {m!r}; expected one of {MEASURE_KINDS}")
    res = walk_evidence(net, evidence, settings=settings)
    if res.zero_likelihood():
        raise ZeroLikelihoodError(
            "evidence has zero probability under this network; ranking undefined"
        )
    return {m: _ranking_from_walk(net, res, m) for m in measures}
