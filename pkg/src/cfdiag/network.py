"""Three-layer noisy-OR diagnostic network: types, validation, CPTs, sampling, I/O.

The model is a bipartite-by-layers Bayesian network. Risk factors are independent
Bernoulli roots. Each disease is a leaky noisy-OR of its risk-factor parents, and
each symptom is a leaky noisy-OR of its disease parents. Every edge carries a
failure probability ``lam``: the probability that an active parent fails to turn
the child on. Every disease and symptom additionally carries a leak failure
probability (the chance the always-on background cause fails to fire), so

    P(child = 0 | parents) = leak * prod(lam_edge for active parents).

All failure probabilities live in (0, 1]. Exact zeros are rejected at validation
time because downstream counterfactual quantities divide by ``lam``; models that
want a near-deterministic edge should use a small epsilon such as 1e-9.

Equivalently, each child is a deterministic OR of per-edge activations
``parent AND NOT u_edge`` plus a leak activation ``NOT u_leak``, with the latent
``u`` variables independent Bernoulli(lam). That structural form is what the
oracle module enumerates; this module only ever needs the product CPT above.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import EvidenceError, RejectionLimitError

__all__ = [
    "Edge",
    "RiskFactor",
    "DiseaseNode",
    "SymptomNode",
    "NoisyOrNetwork",
    "ValidationIssue",
    "ValidationReport",
    "validate_network",
    "Evidence",
    "check_evidence",
    "off_probability",
    "activation_probability",
    "Assignment",
    "ancestral_sample",
    "network_to_dict",
    "network_from_dict",
    "load_network",
    "save_network",
]


# ---------------------------------------------------------------------------
# Model types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    """A noisy-OR edge: ``lam`` is the failure probability of this connection."""

    parent: str
    lam: float


@dataclass(frozen=True)
class RiskFactor:
    id: str
    prior: float


@dataclass(frozen=True)
class DiseaseNode:
    """Disease with leak failure probability and risk-factor parent edges."""

    id: str
    leak: float
    parents: tuple[Edge, ...] = ()

    @cached_property
    def lam_by_parent(self) -> dict[str, float]:
        return {e.parent: e.lam for e in self.parents}


@dataclass(frozen=True)
class SymptomNode:
    """Symptom with leak failure probability and disease parent edges."""

    id: str
    leak: float
    parents: tuple[Edge, ...] = ()

    @cached_property
    def lam_by_parent(self) -> dict[str, float]:
        return {e.parent: e.lam for e in self.parents}


@dataclass(frozen=True)
class NoisyOrNetwork:
    risk_factors: tuple[RiskFactor, ...] = ()
    diseases: tuple[DiseaseNode, ...] = ()
    symptoms: tuple[SymptomNode, ...] = ()

    # -- lookup helpers (derived, cached) -----------------------------------

    @cached_property
    def risk_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.risk_factors)

    @cached_property
    def disease_ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.diseases)

    @cached_property
    def symptom_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.symptoms)

    @cached_property
    def risk_by_id(self) -> dict[str, RiskFactor]:
        return {r.id: r for r in self.risk_factors}

    @cached_property
    def disease_by_id(self) -> dict[str, DiseaseNode]:
        return {d.id: d for d in self.diseases}

    @cached_property
    def symptom_by_id(self) -> dict[str, SymptomNode]:
        return {s.id: s for s in self.symptoms}

    @cached_property
    def risk_index(self) -> dict[str, int]:
        return {r.id: i for i, r in enumerate(self.risk_factors)}

    @cached_property
    def disease_index(self) -> dict[str, int]:
        return {d.id: i for i, d in enumerate(self.diseases)}

    @cached_property
    def symptom_children(self) -> dict[str, tuple[str, ...]]:
        """Disease id -> ids of symptoms that list it as a parent."""
        out: dict[str, list[str]] = {d.id: [] for d in self.diseases}
        for s in self.symptoms:
            for e in s.parents:
                if e.parent in out:
                    out[e.parent].append(s.id)
        return {k: tuple(v) for k, v in out.items()}

    def node_layer(self, node_id: str) -> str | None:
        """Return "risk", "disease", or "symptom", or None if unknown."""
        if node_id in self.risk_by_id:
            return "risk"
        if node_id in self.disease_by_id:
            return "disease"
        if node_id in self.symptom_by_id:
            return "symptom"
        return None


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationIssue:
    code: str  # duplicate-id | duplicate-edge | dangling-edge | layer-violation
    #            prior-range | lambda-range
    node: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"[{i.code}] {i.message}" for i in self.issues)


def _check_lam(issues: list[ValidationIssue], node: str, what: str, lam: float) -> None:
    if not (0.0 < lam <= 1.0):
        hint = ""
        if lam == 0.0:
            hint = " (exact zero is rejected; use a small epsilon such as 1e-9)"
        issues.append(
            ValidationIssue(
                "lambda-range",
                node,
                f"{what} of {node!r} must lie in (0, 1], got {lam!r}{hint}",
            )
        )


def validate_network(net: NoisyOrNetwork) -> ValidationReport:
    """Structural and numeric validation; returns a report, never raises.

    Checks: unique ids across all three layers, edges that point one layer up
    (disease parents are risks, symptom parents are diseases), no duplicate
    parent entries, priors in [0, 1], and all failure probabilities in (0, 1].
    """
    issues: list[ValidationIssue] = []

    seen: dict[str, str] = {}
    for layer, nodes in (
        ("risk", net.risk_factors),
        ("disease", net.diseases),
        ("symptom", net.symptoms),
    ):
        for n in nodes:
            if n.id in seen:
                issues.append(
                    ValidationIssue(
                        "duplicate-id",
                        n.id,
                        f"id {n.id!r} used by both a {seen[n.id]} and a {layer}"
                        if seen[n.id] != layer
                        else f"id {n.id!r} appears twice in the {layer} layer",
                    )
                )
            else:
                seen[n.id] = layer

    for r in net.risk_factors:
        if not (0.0 <= r.prior <= 1.0):
            issues.append(
                ValidationIssue(
                    "prior-range",
                    r.id,
                    f"prior of {r.id!r} must lie in [0, 1], got {r.prior!r}",
                )
            )

    def check_edges(node_id: str, edges: tuple[Edge, ...], want_layer: str) -> None:
        listed: set[str] = set()
        for e in edges:
            if e.parent in listed:
                issues.append(
                    ValidationIssue(
                        "duplicate-edge",
                        node_id,
                        f"{node_id!r} lists parent {e.parent!r} more than once",
                    )
                )
            listed.add(e.parent)
            layer = net.node_layer(e.parent)
            if layer is None:
                issues.append(
                    ValidationIssue(
                        "dangling-edge",
                        node_id,
                        f"{node_id!r} has parent {e.parent!r} which is not a node",
                    )
                )
            elif layer != want_layer:
                issues.append(
                    ValidationIssue(
                        "layer-violation",
                        node_id,
                        f"{node_id!r} has parent {e.parent!r} in the {layer} layer, "
                        f"expected a {want_layer}",
                    )
                )
            _check_lam(issues, node_id, f"edge failure probability from {e.parent!r}", e.lam)

    for d in net.diseases:
        _check_lam(issues, d.id, "leak failure probability", d.leak)
        check_edges(d.id, d.parents, "risk")
    for s in net.symptoms:
        _check_lam(issues, s.id, "leak failure probability", s.leak)
        check_edges(s.id, s.parents, "disease")

    return ValidationReport(tuple(issues))


# ---------------------------------------------------------------------------
# Evidence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Evidence:
    """Observed risk-factor values plus positively/negatively evidenced symptoms.

    ``risks`` maps risk id -> 0/1 for the observed risk factors; unobserved
    risks are simply absent and get marginalised by inference. ``positive`` and
    ``negative`` are symptom ids observed on and off. All three are stored as
    canonically sorted tuples so that iteration order (and therefore float
    accumulation order downstream) never depends on hash seeds.
    """

    risks: tuple[tuple[str, int], ...] = ()
    positive: tuple[str, ...] = ()
    negative: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "risks", tuple(sorted(dict(self.risks).items())))
        object.__setattr__(self, "positive", tuple(sorted(set(self.positive))))
        object.__setattr__(self, "negative", tuple(sorted(set(self.negative))))

    @cached_property
    def risk_map(self) -> dict[str, int]:
        return dict(self.risks)

    @cached_property
    def positive_set(self) -> frozenset[str]:
        return frozenset(self.positive)

    @cached_property
    def negative_set(self) -> frozenset[str]:
        return frozenset(self.negative)

    def to_dict(self) -> dict:
        return {
            "risks": {k: v for k, v in self.risks},
            "positive": list(self.positive),
            "negative": list(self.negative),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Evidence":
        return cls(
            risks=tuple((str(k), int(v)) for k, v in dict(d.get("risks", {})).items()),
            positive=tuple(str(s) for s in d.get("positive", ())),
            negative=tuple(str(s) for s in d.get("negative", ())),
        )


def check_evidence(net: NoisyOrNetwork, ev: Evidence) -> None:
    """Raise EvidenceError listing every problem, or return silently."""
    problems: list[str] = []
    overlap = sorted(ev.positive_set & ev.negative_set)
    if overlap:
        problems.append(f"symptoms both positive and negative: {overlap}")
    for rid, val in ev.risks:
        layer = net.node_layer(rid)
        if layer != "risk":
            problems.append(f"risk evidence on {rid!r} which is {layer or 'unknown'}")
        if val not in (0, 1):
            problems.append(f"risk {rid!r} has non-binary value {val!r}")
    for sid in (*ev.positive, *ev.negative):
        layer = net.node_layer(sid)
        if layer != "symptom":
            problems.append(f"symptom evidence on {sid!r} which is {layer or 'unknown'}")
    if problems:
        raise EvidenceError("; ".join(problems))


# ---------------------------------------------------------------------------
# CPTs
# ---------------------------------------------------------------------------


def off_probability(
    net: NoisyOrNetwork, node_id: str, parent_states: Mapping[str, int]
) -> float:
    """P(node = 0 | parent assignment) for a disease or symptom.

    ``parent_states`` must assign a 0/1 value to every parent of the node;
    extra keys are ignored, which makes it convenient to pass a full layer
    assignment. Equal to leak times the product of edge failure probabilities
    of the active parents.
    """
    layer = net.node_layer(node_id)
    if layer == "disease":
        node = net.disease_by_id[node_id]
    elif layer == "symptom":
        node = net.symptom_by_id[node_id]
    else:
        raise KeyError(f"{node_id!r} is not a disease or symptom")
    p = node.leak
    for e in node.parents:
        try:
            on = parent_states[e.parent]
        except KeyError:
            raise KeyError(f"parent state for {e.parent!r} missing") from None
        if on:
            p *= e.lam
    return p


def activation_probability(
    net: NoisyOrNetwork, node_id: str, parent_states: Mapping[str, int]
) -> float:
    """P(node = 1 | parent assignment); complement of `off_probability`."""
    return 1.0 - off_probability(net, node_id, parent_states)


# ---------------------------------------------------------------------------
# Ancestral sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Assignment:
    """A full joint state: one 0/1 value per risk, disease, and symptom."""

    risks: tuple[tuple[str, int], ...]
    diseases: tuple[tuple[str, int], ...]
    symptoms: tuple[tuple[str, int], ...]

    @cached_property
    def as_dict(self) -> dict[str, int]:
        out = dict(self.risks)
        out.update(self.diseases)
        out.update(self.symptoms)
        return out

    def on_symptoms(self) -> tuple[str, ...]:
        return tuple(s for s, v in self.symptoms if v == 1)


def ancestral_sample(
    net: NoisyOrNetwork,
    rng: np.random.Generator,
    *,
    risk_overrides: Mapping[str, int] | None = None,
    force_disease: str | None = None,
    max_rejects: int = 1_000_000,
) -> Assignment:
    """Draw one joint assignment in topological order.

    ``risk_overrides`` clamps the listed risk factors instead of sampling them.
    ``force_disease`` rejection-samples until that disease comes out on; after
    ``max_rejects`` failed attempts a RejectionLimitError is raised (the cap
    exists because a forced disease whose activation probability is tiny under
    the override can make acceptance astronomically rare).
    """
    if force_disease is not None and force_disease not in net.disease_by_id:
        raise KeyError(f"unknown disease {force_disease!r}")
    overrides = dict(risk_overrides or {})
    for rid in overrides:
        if rid not in net.risk_by_id:
            raise KeyError(f"risk override for unknown risk {rid!r}")

    for _ in range(max_rejects):
        risks: dict[str, int] = {}
        for r in net.risk_factors:
            if r.id in overrides:
                risks[r.id] = int(overrides[r.id])
            else:
                risks[r.id] = int(rng.random() < r.prior)
        diseases: dict[str, int] = {}
        for d in net.diseases:
            diseases[d.id] = int(rng.random() >= off_probability(net, d.id, risks))
        if force_disease is not None and not diseases[force_disease]:
            continue
        symptoms: dict[str, int] = {}
        for s in net.symptoms:
            symptoms[s.id] = int(rng.random() >= off_probability(net, s.id, diseases))
        return Assignment(
            risks=tuple(risks.items()),
            diseases=tuple(diseases.items()),
            symptoms=tuple(symptoms.items()),
        )
    raise RejectionLimitError(
        f"disease {force_disease!r} not active after {max_rejects} draws"
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _edges_to_json(edges: tuple[Edge, ...]) -> list[dict]:
    return [{"id": e.parent, "lambda": e.lam} for e in edges]


def _edges_from_json(items: Iterable[Mapping]) -> tuple[Edge, ...]:
    return tuple(Edge(parent=str(e["id"]), lam=float(e["lambda"])) for e in items)


def network_to_dict(net: NoisyOrNetwork) -> dict:
    return {
        "risk_factors": [{"id": r.id, "prior": r.prior} for r in net.risk_factors],
        "diseases": [
            {"id": d.id, "leak": d.leak, "parents": _edges_to_json(d.parents)}
            for d in net.diseases
        ],
        "symptoms": [
            {"id": s.id, "leak": s.leak, "parents": _edges_to_json(s.parents)}
            for s in net.symptoms
        ],
    }


def network_from_dict(d: Mapping) -> NoisyOrNetwork:
    return NoisyOrNetwork(
        risk_factors=tuple(
            RiskFactor(id=str(r["id"]), prior=float(r["prior"]))
            for r in d.get("risk_factors", ())
        ),
        diseases=tuple(
            DiseaseNode(
                id=str(n["id"]),
                leak=float(n["leak"]),
                parents=_edges_from_json(n.get("parents", ())),
            )
            for n in d.get("diseases", ())
        ),
        symptoms=tuple(
            SymptomNode(
                id=str(n["id"]),
                leak=float(n["leak"]),
                parents=_edges_from_json(n.get("parents", ())),
            )
            for n in d.get("symptoms", ())
        ),
    )


def load_network(path: str) -> NoisyOrNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return network_from_dict(json.load(fh))


def save_network(net: NoisyOrNetwork, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_dict(net), fh, indent=2, sort_keys=True)
        fh.write("\n")
