"""Ranking benchmark harness and measure-property report.

``evaluate_topk`` scores a vignette corpus: each vignette is ranked under
every requested measure (one subset walk per vignette serves them all), and
the report aggregates top-k accuracy curves with Wilson confidence
intervals, mean/std of the true disease's rank, pairwise win/draw/loss
counts between measures, and a per-rarity-bucket breakdown. Vignettes whose
evidence has zero likelihood under the model, or whose signed subset sums
cancel too heavily for a trustworthy ratio, are listed in the report and
excluded from every statistic — reported, never silently dropped.

``desiderata_report`` checks the structural promises of the counterfactual
measures on randomized networks: diseases that cannot cause any evidenced
symptom score exactly zero (causality), no score exceeds its count of
positively evidenced children (simplicity), zero-posterior diseases score
zero (consistency), the unit-corrections diagnostic reproduces the
posterior, and the closed forms agree with the definition-level enumeration
oracle. Violations are report content, not exceptions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import NumericsError, ZeroLikelihoodError
from .inference import InferenceSettings, walk_evidence
from .measures import MEASURE_KINDS, rank_all_measures
from .network import (
    DiseaseNode,
    Edge,
    Evidence,
    NoisyOrNetwork,
    SymptomNode,
)
from .oracle import measure_oracle, posterior_oracle
from .randomnets import random_evidence, random_network
from .vignettes import RARITY_LABELS, Vignette

__all__ = [
    "wilson_interval",
    "TopkPoint",
    "MeasureOutcome",
    "PairwiseOutcome",
    "RarityStratum",
    "BenchmarkReport",
    "evaluate_topk",
    "CheckResult",
    "DesiderataReport",
    "desiderata_report",
]

_SEED_PURPOSE = 0x4445  # stream label for desiderata_report's sampling


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; (0, 1) when n = 0."""
    if n <= 0:
        return (0.0, 1.0)
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return (max(0.0, centre - half), min(1.0, centre + half))


# ---------------------------------------------------------------------------
# Report types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TopkPoint:
    k: int
    accuracy: float
    ci_low: float
    ci_high: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "accuracy": self.accuracy,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
        }


@dataclass(frozen=True)
class MeasureOutcome:
    """One measure's aggregate results over the scored vignettes."""

    measure: str
    topk: tuple[TopkPoint, ...]
    mean_rank: float
    rank_std: float
    vignette_k_accuracy: float | None  # per-vignette-k mode, None when unused

    def accuracy_at(self, k: int) -> float:
        for p in self.topk:
            if p.k == k:
                return p.accuracy
        raise ValueError(f"k={k} not in report (k_max={self.topk[-1].k})")

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "topk": [p.to_dict() for p in self.topk],
            "mean_rank": self.mean_rank,
            "rank_std": self.rank_std,
            "vignette_k_accuracy": self.vignette_k_accuracy,
        }


@dataclass(frozen=True)
class PairwiseOutcome:
    """How often measure_a placed the true disease strictly better than b."""

    measure_a: str
    measure_b: str
    wins: int
    draws: int
    losses: int

    def to_dict(self) -> dict:
        return {
            "measure_a": self.measure_a,
            "measure_b": self.measure_b,
            "wins": self.wins,
            "draws": self.draws,
            "losses": self.losses,
        }


@dataclass(frozen=True)
class RarityStratum:
    """Top-k accuracy restricted to one rarity bucket."""

    rarity: str
    n: int
    accuracy: tuple[tuple[str, tuple[float, ...]], ...]  # (measure, acc at k=1..K)

    def accuracy_of(self, measure: str) -> tuple[float, ...]:
        for m, acc in self.accuracy:
            if m == measure:
                return acc
        raise ValueError(f"measure {measure!r} not in stratum")

    def to_dict(self) -> dict:
        return {
            "rarity": self.rarity,
            "n": self.n,
            "accuracy": [
                {"measure": m, "topk_accuracy": list(acc)} for m, acc in self.accuracy
            ],
        }


@dataclass(frozen=True)
class BenchmarkReport:
    """Aggregate results; ``n_scored`` counts vignettes that entered the stats.

    The two exclusion lists are disjoint: ``zero_likelihood_ids`` holds
    vignettes whose evidence has probability zero (to numerical resolution)
    under the model, ``numerics_unstable_ids`` holds vignettes where the
    signed subset sums cancelled so heavily that a ratio left its feasible
    range by more than the clamp tolerance. Both are reported, never
    silently dropped.
    """

    n_vignettes: int
    n_scored: int
    zero_likelihood_ids: tuple[str, ...]
    numerics_unstable_ids: tuple[str, ...]
    k_max: int
    measures: tuple[MeasureOutcome, ...]
    pairwise: tuple[PairwiseOutcome, ...]
    strata: tuple[RarityStratum, ...]
    policy: dict | None

    def outcome_of(self, measure: str) -> MeasureOutcome:
        for m in self.measures:
            if m.measure == measure:
                return m
        raise ValueError(f"measure {measure!r} not in report")

    def to_dict(self) -> dict:
        return {
            "n_vignettes": self.n_vignettes,
            "n_scored": self.n_scored,
            "zero_likelihood_ids": list(self.zero_likelihood_ids),
            "numerics_unstable_ids": list(self.numerics_unstable_ids),
            "k_max": self.k_max,
            "measures": [m.to_dict() for m in self.measures],
            "pairwise": [p.to_dict() for p in self.pairwise],
            "strata": [s.to_dict() for s in self.strata],
            "policy": self.policy,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_dict(d: Mapping) -> "BenchmarkReport":
        measures = tuple(
            MeasureOutcome(
                measure=str(m["measure"]),
                topk=tuple(
                    TopkPoint(int(p["k"]), float(p["accuracy"]), float(p["ci_low"]), float(p["ci_high"]))
                    for p in m["topk"]
                ),
                mean_rank=float(m["mean_rank"]),
                rank_std=float(m["rank_std"]),
                vignette_k_accuracy=(
                    None if m["vignette_k_accuracy"] is None else float(m["vignette_k_accuracy"])
                ),
            )
            for m in d["measures"]
        )
        pairwise = tuple(
            PairwiseOutcome(
                str(p["measure_a"]), str(p["measure_b"]), int(p["wins"]), int(p["draws"]), int(p["losses"])
            )
            for p in d["pairwise"]
        )
        strata = tuple(
            RarityStratum(
                rarity=str(s["rarity"]),
                n=int(s["n"]),
                accuracy=tuple(
                    (str(a["measure"]), tuple(float(x) for x in a["topk_accuracy"]))
                    for a in s["accuracy"]
                ),
            )
            for s in d["strata"]
        )
        return BenchmarkReport(
            n_vignettes=int(d["n_vignettes"]),
            n_scored=int(d["n_scored"]),
            zero_likelihood_ids=tuple(str(x) for x in d["zero_likelihood_ids"]),
            numerics_unstable_ids=tuple(str(x) for x in d["numerics_unstable_ids"]),
            k_max=int(d["k_max"]),
            measures=measures,
            pairwise=pairwise,
            strata=strata,
            policy=dict(d["policy"]) if d["policy"] is not None else None,
        )

    @staticmethod
    def from_json(text: str) -> "BenchmarkReport":
        return BenchmarkReport.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """Per-k accuracy rows for plotting: measure,k,accuracy,ci_low,ci_high."""
        lines = ["measure,k,accuracy,ci_low,ci_high"]
        for m in self.measures:
            for p in m.topk:
                lines.append(
                    f"{m.measure},{p.k},{p.accuracy!r},{p.ci_low!r},{p.ci_high!r}"
                )
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @staticmethod
    def load(path: str | Path) -> "BenchmarkReport":
        return BenchmarkReport.from_json(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _curve(ranks: Sequence[int], k_max: int) -> tuple[TopkPoint, ...]:
    n = len(ranks)
    pts = []
    for k in range(1, k_max + 1):
        hits = sum(1 for r in ranks if r <= k)
        lo, hi = wilson_interval(hits, n)
        pts.append(TopkPoint(k, hits / n if n else 0.0, lo, hi))
    return tuple(pts)


def evaluate_topk(
    net: NoisyOrNetwork,
    vignettes: Sequence[Vignette],
    *,
    measures: tuple[str, ...] = MEASURE_KINDS,
    k_max: int = 20,
    settings: InferenceSettings | None = None,
    k_per_vignette: Mapping[str, int] | int | None = None,
    policy: Mapping | None = None,
) -> BenchmarkReport:
    """Rank every vignette under every measure and aggregate.

    ``k_per_vignette`` enables the variable-differential mode: accuracy is
    additionally computed with each vignette's own cutoff (an int applies to
    all, a mapping is keyed by vignette id with ``k_max`` as fallback).
    ``policy`` is echoed verbatim into the report so runs are
    self-describing. Aggregation follows vignette list order; the result is
    deterministic for a fixed corpus.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    ranks: dict[str, list[int]] = {m: [] for m in measures}
    per_vignette_hits: dict[str, int] = {m: 0 for m in measures}
    rarities: list[str] = []
    zero_ids: list[str] = []
    unstable_ids: list[str] = []
    for v in vignettes:
        try:
            rankings = rank_all_measures(
                net, v.evidence(), measures=measures, settings=settings
            )
        except ZeroLikelihoodError:
            zero_ids.append(v.id)
            continue
        except NumericsError:
            unstable_ids.append(v.id)
            continue
        if k_per_vignette is None:
            kv = None
        elif isinstance(k_per_vignette, int):
            kv = k_per_vignette
        else:
            kv = int(k_per_vignette.get(v.id, k_max))
        for m in measures:
            r = rankings[m].position_of(v.true_disease)
            ranks[m].append(r)
            if kv is not None and r <= kv:
                per_vignette_hits[m] += 1
        rarities.append(v.rarity)
    n_scored = len(rarities)

    outcomes = []
    for m in measures:
        rs = ranks[m]
        outcomes.append(
            MeasureOutcome(
                measure=m,
                topk=_curve(rs, k_max),
                mean_rank=float(np.mean(rs)) if rs else 0.0,
                rank_std=float(np.std(rs)) if rs else 0.0,
                vignette_k_accuracy=(
                    per_vignette_hits[m] / n_scored
                    if k_per_vignette is not None and n_scored
                    else (None if k_per_vignette is None else 0.0)
                ),
            )
        )

    pairwise = []
    for i, a in enumerate(measures):
        for b in measures[i + 1 :]:
            wins = sum(1 for ra, rb in zip(ranks[a], ranks[b]) if ra < rb)
            losses = sum(1 for ra, rb in zip(ranks[a], ranks[b]) if ra > rb)
            draws = n_scored - wins - losses
            pairwise.append(PairwiseOutcome(a, b, wins, draws, losses))

    strata = []
    for label in RARITY_LABELS:
        idx = [i for i, r in enumerate(rarities) if r == label]
        if not idx:
            continue
        acc = []
        for m in measures:
            rs = [ranks[m][i] for i in idx]
            acc.append(
                (m, tuple(sum(1 for r in rs if r <= k) / len(rs) for k in range(1, k_max + 1)))
            )
        strata.append(RarityStratum(rarity=label, n=len(idx), accuracy=tuple(acc)))

    return BenchmarkReport(
        n_vignettes=len(vignettes),
        n_scored=n_scored,
        zero_likelihood_ids=tuple(zero_ids),
        numerics_unstable_ids=tuple(unstable_ids),
        k_max=k_max,
        measures=tuple(outcomes),
        pairwise=tuple(pairwise),
        strata=tuple(strata),
        policy=dict(policy) if policy is not None else None,
    )


# ---------------------------------------------------------------------------
# Desiderata report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    violations: int
    worst_deviation: float

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "cases": self.cases,
            "violations": self.violations,
            "worst_deviation": self.worst_deviation,
        }


@dataclass(frozen=True)
class DesiderataReport:
    trials: int
    seed: int
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.violations == 0 for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise ValueError(f"no check named {name!r}")

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "ok": self.ok,
            "checks": [c.to_dict() for c in self.checks],
        }


class _Check:
    __slots__ = ("name", "cases", "violations", "worst")

    def __init__(self, name: str) -> None:
        self.name = name
        self.cases = 0
        self.violations = 0
        self.worst = 0.0

    def record(self, deviation: float, tol: float) -> None:
        self.cases += 1
        dev = abs(deviation)
        if dev > self.worst:
            self.worst = dev
        if dev > tol:
            self.violations += 1

    def result(self) -> CheckResult:
        return CheckResult(self.name, self.cases, self.violations, self.worst)


def _with_zero_disease(
    net: NoisyOrNetwork, rng: np.random.Generator
) -> tuple[NoisyOrNetwork, str]:
    """Add a structurally-impossible disease (leak 1.0, no risk parents).

    Its activation probability is exactly zero, so its posterior is zero for
    any evidence — the testable extreme of consistency-at-zero.
    """
    did = "zz-never"
    n_children = int(rng.integers(1, len(net.symptoms) + 1))
    chosen = set(
        rng.choice(len(net.symptoms), size=n_children, replace=False).tolist()
    )
    symptoms = tuple(
        SymptomNode(
            s.id,
            leak=s.leak,
            parents=s.parents + (Edge(did, float(rng.uniform(0.05, 0.95))),),
        )
        if i in chosen
        else s
        for i, s in enumerate(net.symptoms)
    )
    diseases = net.diseases + (DiseaseNode(did, leak=1.0),)
    return (
        NoisyOrNetwork(
            risk_factors=net.risk_factors, diseases=diseases, symptoms=symptoms
        ),
        did,
    )


def _default_sampler(rng: np.random.Generator) -> tuple[NoisyOrNetwork, Evidence]:
    net = random_network(
        rng,
        n_risks=int(rng.integers(0, 4)),
        n_diseases=int(rng.integers(1, 5)),
        n_symptoms=int(rng.integers(1, 6)),
    )
    for _ in range(50):
        ev = random_evidence(net, rng)
        if ev.positive:
            return net, ev
    return net, random_evidence(net, rng)


def desiderata_report(
    trials: int,
    seed: int,
    *,
    sampler: Callable[[np.random.Generator], tuple[NoisyOrNetwork, Evidence]] | None = None,
    settings: InferenceSettings | None = None,
    oracle_check: bool = True,
) -> DesiderataReport:
    """Property checks of the measures on ``trials`` random networks.

    Checks (violations counted beyond the stated tolerance):

    * ``causality-zero`` — no positively evidenced child => measure exactly 0
      (tolerance 1e-12 absolute);
    * ``simplicity-bound`` — measure <= count of positively evidenced
      children (1e-12);
    * ``consistency-at-zero`` — an impossible disease (posterior 0) scores 0
      (1e-12);
    * ``posterior-recovery`` — unit-corrections mode equals the posterior
      (1e-12);
    * ``closed-vs-oracle`` — closed forms match the enumeration oracle
      (relative 1e-9, absolute 1e-12 near zero; skipped when
      ``oracle_check=False`` for speed).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, _SEED_PURPOSE]))
    sample = sampler or _default_sampler
    causality = _Check("causality-zero")
    simplicity = _Check("simplicity-bound")
    consistency = _Check("consistency-at-zero")
    recovery = _Check("posterior-recovery")
    closed = _Check("closed-vs-oracle")

    for _ in range(trials):
        net, ev = sample(rng)
        net, zero_id = _with_zero_disease(net, rng)
        try:
            rankings = rank_all_measures(net, ev, settings=settings)
        except ZeroLikelihoodError:
            continue
        by_measure = {
            m: {e.disease: e.value for e in rankings[m].entries} for m in MEASURE_KINDS
        }
        posteriors = {
            e.disease: p
            for e, p in zip(
                rankings["posterior"].entries, rankings["posterior"].posteriors
            )
        }
        pos_children = {
            d: sum(1 for s in ev.positive if d in net.symptom_by_id[s].lam_by_parent)
            for d in net.disease_ids
        }
        unit = walk_evidence(net, ev, settings=settings, unit_corrections=True)
        for d in net.disease_ids:
            suff = by_measure["sufficiency"][d]
            dis = by_measure["disablement"][d]
            if pos_children[d] == 0:
                causality.record(suff, 1e-12)
                causality.record(dis, 1e-12)
            simplicity.record(max(0.0, suff - pos_children[d]), 1e-12)
            simplicity.record(max(0.0, dis - pos_children[d]), 1e-12)
            k = unit.index_of(d)
            for nums in (unit.sufficiency_numerators, unit.disablement_numerators):
                recovery.record(nums[k].ratio_to(unit.likelihood) - posteriors[d], 1e-12)
            if oracle_check:
                for kind in ("sufficiency", "disablement"):
                    truth = measure_oracle(net, ev, d, kind)
                    got = by_measure[kind][d]
                    scale = max(abs(truth), 1e-3)
                    closed.record((got - truth) / scale if abs(truth) > 1e-12 else got - truth, 1e-9)
                closed.record(posterior_oracle(net, ev, d) - posteriors[d], 1e-9)
        consistency.record(posteriors[zero_id], 1e-12)
        consistency.record(by_measure["sufficiency"][zero_id], 1e-12)
        consistency.record(by_measure["disablement"][zero_id], 1e-12)

    checks = [causality, simplicity, consistency, recovery]
    if oracle_check:
        checks.append(closed)
    return DesiderataReport(
        trials=trials, seed=seed, checks=tuple(c.result() for c in checks)
    )
