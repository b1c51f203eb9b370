"""Twin-network construction and counterfactual inference over it.

A counterfactual query lives on a *twin network*: two copies of the model —
the factual world carrying the evidence and a counterfactual world carrying
the intervention — joined by their shared exogenous noise. Nodes whose value
provably coincides in both worlds collapse ("merge") into a single shared
node:

* risk factors always merge (nothing upstream of them is intervened on);
* a disease merges unless it is itself intervened on;
* a symptom merges unless some parent disease is intervened on or its leak
  cause is disabled in the counterfactual world — only then can the two
  copies diverge.

The split symptoms are exactly where a counterfactual can differ from the
factual observation, and their two copies are coupled through a joint
(factual, counterfactual) CPT obtained by integrating the shared edge and
leak noises. ``twin_query`` runs exact inference directly on this structure
by enumerating risk completions and factual disease states; it must agree
with the three-step procedure (condition noise on evidence, apply surgery,
re-evaluate) computed by ``oracle.counterfactual_query``, and the agreement
is a load-bearing cross-check of both implementations.

``TwinNetwork.to_dot`` renders the construction for visual inspection:
shared nodes once, split pairs with a starred dashed counterfactual copy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import CapExceededError, ZeroLikelihoodError
from .network import Evidence, NoisyOrNetwork, check_evidence, off_probability
from .oracle import (
    CounterfactualDistribution,
    CounterfactualIntervention,
    _risk_table,
    dual_symptom_joint,
    latent_entries,
)

__all__ = [
    "TwinLatent",
    "TwinNetwork",
    "build_twin_network",
    "twin_query",
]

_MAX_TWIN_DISEASES = 14  # twin enumeration visits 2^n_d factual disease states


@dataclass(frozen=True)
class TwinLatent:
    """Scope of one exogenous variable in the twin graph.

    ``scope`` is "shared" when both worlds read the same noise value, or
    "factual-only" when the counterfactual equation drops the variable (a
    disabled leak: the noise still drives the factual copy but nothing in the
    counterfactual world).
    """

    child: str
    parent: str  # "" for risk roots and leak noises
    kind: str  # "risk" | "leak" | "edge"
    scope: str  # "shared" | "factual-only"


@dataclass(frozen=True)
class TwinNetwork:
    """The merged two-world graph for one intervention.

    ``split_diseases`` are the intervened diseases: their counterfactual
    copies are pinned to 0 and have no incoming edges. ``split_symptoms``
    keep both copies; every other node appears once. ``pruned_symptoms``
    (populated when evidence is supplied) are the unevidenced symptoms whose
    remaining copies influence neither the evidence weight nor any
    counterfactual query over evidenced symptoms, so twin inference drops
    them outright.
    """

    network: NoisyOrNetwork
    intervention: CounterfactualIntervention
    merged_risks: tuple[str, ...]
    merged_diseases: tuple[str, ...]
    split_diseases: tuple[str, ...]
    merged_symptoms: tuple[str, ...]
    split_symptoms: tuple[str, ...]
    pruned_symptoms: tuple[str, ...]
    latents: tuple[TwinLatent, ...]

    def is_split_symptom(self, sid: str) -> bool:
        return sid in self._split_symptom_set

    @property
    def _split_symptom_set(self) -> frozenset[str]:
        return frozenset(self.split_symptoms)

    def to_dot(self) -> str:
        """GraphViz text: shared nodes once, counterfactual copies starred."""
        net = self.network
        split_d = set(self.split_diseases)
        split_s = set(self.split_symptoms)
        pruned = set(self.pruned_symptoms)
        lines = [
            "digraph twin {",
            "  rankdir=LR;",
            '  node [fontname="Helvetica"];',
        ]
        for rid in self.merged_risks:
            lines.append(f'  "{rid}" [shape=box];')
        for did in net.disease_ids:
            if did in split_d:
                lines.append(f'  "{did}" [shape=ellipse];')
                lines.append(
                    f'  "{did}*" [shape=ellipse, style=dashed, label="{did}* = 0"];'
                )
            else:
                lines.append(f'  "{did}" [shape=ellipse, peripheries=2];')
        for sid in net.symptom_ids:
            if sid in pruned:
                continue
            if sid in split_s:
                lines.append(f'  "{sid}" [shape=oval];')
                lines.append(f'  "{sid}*" [shape=oval, style=dashed];')
            else:
                lines.append(f'  "{sid}" [shape=oval, peripheries=2];')
        for d in net.diseases:
            for e in d.parents:
                lines.append(f'  "{e.parent}" -> "{d.id}";')
                # intervened counterfactual copies take no incoming edges
        for s in net.symptoms:
            if s.id in pruned:
                continue
            for e in s.parents:
                lines.append(f'  "{e.parent}" -> "{s.id}";')
                if s.id in split_s:
                    src = f"{e.parent}*" if e.parent in split_d else e.parent
                    lines.append(f'  "{src}" -> "{s.id}*" [style=dashed];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_twin_network(
    net: NoisyOrNetwork,
    intervention: CounterfactualIntervention,
    *,
    evidence: Evidence | None = None,
) -> TwinNetwork:
    """Classify every node of the two-world graph as merged, split, or pruned.

    With ``evidence`` absent, only the structural merge (intervention-driven)
    is performed and nothing is pruned.
    """
    for d in intervention.diseases_off:
        if d not in net.disease_by_id:
            raise ValueError(f"intervention on unknown disease {d!r}")
    for s in intervention.disabled_leaks:
        if s not in net.symptom_by_id:
            raise ValueError(f"leak intervention on unknown symptom {s!r}")
    off = intervention.diseases_off_set
    leak_off = intervention.disabled_leaks_set
    if evidence is not None:
        evidenced = evidence.positive_set | evidence.negative_set
        pruned = tuple(s for s in net.symptom_ids if s not in evidenced)
    else:
        pruned = ()
    pruned_set = set(pruned)
    split_symptoms = tuple(
        s.id
        for s in net.symptoms
        if s.id not in pruned_set
        and (s.id in leak_off or any(e.parent in off for e in s.parents))
    )
    split_set = set(split_symptoms)
    merged_symptoms = tuple(
        s.id
        for s in net.symptoms
        if s.id not in split_set and s.id not in pruned_set
    )
    latents = tuple(
        TwinLatent(
            child=e.child,
            parent=e.parent,
            kind=e.kind,
            scope="factual-only" if e.kind == "leak" and e.child in leak_off else "shared",
        )
        for e in latent_entries(net)
        if e.child not in pruned_set
    )
    return TwinNetwork(
        network=net,
        intervention=intervention,
        merged_risks=net.risk_ids,
        merged_diseases=tuple(d for d in net.disease_ids if d not in off),
        split_diseases=tuple(d for d in net.disease_ids if d in off),
        merged_symptoms=merged_symptoms,
        split_symptoms=split_symptoms,
        pruned_symptoms=pruned,
        latents=latents,
    )


def twin_query(
    net: NoisyOrNetwork,
    evidence: Evidence,
    intervention: CounterfactualIntervention,
    *,
    query_symptoms: tuple[str, ...] | None = None,
) -> CounterfactualDistribution:
    """Exact counterfactual distribution by enumeration on the twin network.

    Enumerates risk completions and factual disease states; split symptoms
    contribute through their joint two-world CPTs, merged symptoms pin the
    counterfactual value to the factual one, pruned symptoms are skipped.
    ``query_symptoms`` defaults to all evidenced symptoms and must be a
    subset of them.
    """
    check_evidence(net, evidence)
    twin = build_twin_network(net, intervention, evidence=evidence)
    evidenced = tuple(sorted(evidence.positive_set | evidence.negative_set))
    query = query_symptoms if query_symptoms is not None else evidenced
    if set(query) - set(evidenced):
        raise ValueError("query symptoms must be evidenced symptoms")
    n_d = len(net.diseases)
    if n_d > _MAX_TWIN_DISEASES:
        raise CapExceededError(
            f"2^{n_d} factual disease states exceed the twin enumeration cap "
            f"2^{_MAX_TWIN_DISEASES}"
        )
    risk_weights, risk_states = _risk_table(net, evidence.risk_map)
    r_index = net.risk_index
    pos_set = evidence.positive_set
    split_set = set(twin.split_symptoms)
    query_pos = {sid: i for i, sid in enumerate(query)}
    obs_value = {sid: (1 if sid in pos_set else 0) for sid in evidenced}

    table = np.zeros(1 << len(query))
    on_cache: dict[tuple[str, tuple[int, ...]], float] = {}
    dual_cache: dict[tuple, dict[tuple[int, int], float]] = {}

    for w_r, row in zip(risk_weights, risk_states):
        if w_r == 0.0:
            continue
        risk_state = {rid: int(row[r_index[rid]]) for rid in net.risk_ids}
        p_on = np.empty(n_d)
        for j, d in enumerate(net.diseases):
            key = (d.id, tuple(risk_state[e.parent] for e in d.parents))
            if key not in on_cache:
                on_cache[key] = 1.0 - off_probability(net, d.id, risk_state)
            p_on[j] = on_cache[key]
        for dvals in itertools.product((0, 1), repeat=n_d):
            w = w_r
            for j in range(n_d):
                w *= p_on[j] if dvals[j] else 1.0 - p_on[j]
            if w == 0.0:
                continue
            dstate = dict(zip(net.disease_ids, dvals))
            # factors[i][v] = weight contribution of query symptom i taking
            # counterfactual value v; scalar weight handles the rest.
            factors: list[tuple[float, float]] = [(0.0, 0.0)] * len(query)
            for sid in evidenced:
                v_obs = obs_value[sid]
                if sid in split_set:
                    pairs_key = (
                        sid,
                        tuple(dstate[e.parent] for e in net.symptom_by_id[sid].parents),
                    )
                    if pairs_key not in dual_cache:
                        dual_cache[pairs_key] = dual_symptom_joint(
                            net,
                            sid,
                            dstate,
                            diseases_off=intervention.diseases_off,
                            leak_disabled=sid in intervention.disabled_leaks_set,
                        )
                    tbl = dual_cache[pairs_key]
                    if sid in query_pos:
                        factors[query_pos[sid]] = (tbl[(v_obs, 0)], tbl[(v_obs, 1)])
                    else:
                        w *= tbl[(v_obs, 0)] + tbl[(v_obs, 1)]
                else:
                    p_off = off_probability(net, sid, dstate)
                    p_obs = p_off if v_obs == 0 else 1.0 - p_off
                    if sid in query_pos:
                        # merged: counterfactual is pinned to the factual value
                        factors[query_pos[sid]] = (
                            (p_obs, 0.0) if v_obs == 0 else (0.0, p_obs)
                        )
                    else:
                        w *= p_obs
                if w == 0.0:
                    break
            if w == 0.0:
                continue
            for code in range(1 << len(query)):
                contrib = w
                for i in range(len(query)):
                    contrib *= factors[i][(code >> i) & 1]
                    if contrib == 0.0:
                        break
                if contrib:
                    table[code] += contrib
    mass = float(table.sum())
    if mass <= 0.0:
        raise ZeroLikelihoodError("evidence has probability zero under the model")
    return CounterfactualDistribution(symptoms=tuple(query), table=table / mass)
