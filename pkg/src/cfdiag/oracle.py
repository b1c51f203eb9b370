"""Brute-force reference engine: latent enumeration, abduction, factored queries.

Everything in this module is definition-level. A network is treated as a
structural causal model: each disease or symptom is a deterministic OR of
``parent AND NOT u_edge`` terms plus a leak term ``NOT u_leak``, with all ``u``
variables independent Bernoulli (``P(u=1) = lam``, the failure probability).
Counterfactuals are computed the long way: condition the latent variables on the
factual evidence, apply the intervention, and re-run the structural equations on
the shared latents. No inclusion-exclusion, no closed forms; the fast paths
elsewhere are tested against this module, never the other way round.

Two interchangeable engines are provided:

* ``method="latent"`` enumerates every joint latent assignment (vectorised over
  chunks of the latent hypercube). It is the most literal rendering of the
  semantics and is exponential in the *total* latent count, so it is capped.
* ``method="factored"`` sums out each node's private latent block in place,
  which is algebraically the same sum re-associated: latents never appear in
  two different structural equations, only in the two copies (factual and
  counterfactual) of the *same* equation, so the joint over both copies of a
  node given both parent vectors is obtained by enumerating that node's block
  alone. This makes nets with many edges tractable while staying exact. The two
  engines are cross-checked in the test suite on every net small enough for the
  literal one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import CapExceededError, ZeroLikelihoodError
from .network import (
    Evidence,
    NoisyOrNetwork,
    check_evidence,
)

__all__ = [
    "LatentEntry",
    "latent_entries",
    "JointTable",
    "enumerate_joint",
    "CounterfactualIntervention",
    "CounterfactualDistribution",
    "counterfactual_query",
    "dual_symptom_cpt",
    "dual_symptom_joint",
    "measure_oracle",
    "posterior_oracle",
    "sufficiency_intervention",
    "disablement_intervention",
]

_CHUNK_BITS = 20  # latent hypercube is processed in chunks of 2^20 assignments


# ---------------------------------------------------------------------------
# Latent space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatentEntry:
    """One exogenous variable: a risk root, a leak noise, or an edge noise.

    ``p_one`` is P(variable = 1). For a risk root the variable *is* the risk
    value (p_one = prior); for leak and edge noises the value 1 means the
    corresponding cause fails to fire (p_one = failure probability).
    """

    child: str
    parent: str  # "" for risk roots and leak noises
    kind: str  # "risk" | "leak" | "edge"
    p_one: float


def latent_entries(net: NoisyOrNetwork) -> tuple[LatentEntry, ...]:
    """All exogenous variables in canonical order, sorted by (child, parent)."""
    entries: list[LatentEntry] = []
    for r in net.risk_factors:
        entries.append(LatentEntry(r.id, "", "risk", r.prior))
    for d in net.diseases:
        entries.append(LatentEntry(d.id, "", "leak", d.leak))
        for e in d.parents:
            entries.append(LatentEntry(d.id, e.parent, "edge", e.lam))
    for s in net.symptoms:
        entries.append(LatentEntry(s.id, "", "leak", s.leak))
        for e in s.parents:
            entries.append(LatentEntry(s.id, e.parent, "edge", e.lam))
    entries.sort(key=lambda e: (e.child, e.parent))
    return tuple(entries)


# ---------------------------------------------------------------------------
# Interventions and query results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CounterfactualIntervention:
    """Counterfactual-world surgery: diseases forced to 0 and leaks removed.

    ``diseases_off`` lists diseases whose counterfactual copy is set to 0.
    ``disabled_leaks`` lists symptoms whose counterfactual structural equation
    drops the leak term entirely, i.e. the background cause is switched off in
    the counterfactual world. Only the counterfactual copies are touched; the
    factual world is never intervened on.
    """

    diseases_off: tuple[str, ...] = ()
    disabled_leaks: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "diseases_off", tuple(sorted(set(self.diseases_off))))
        object.__setattr__(self, "disabled_leaks", tuple(sorted(set(self.disabled_leaks))))

    @cached_property
    def diseases_off_set(self) -> frozenset[str]:
        return frozenset(self.diseases_off)

    @cached_property
    def disabled_leaks_set(self) -> frozenset[str]:
        return frozenset(self.disabled_leaks)


def sufficiency_intervention(
    net: NoisyOrNetwork, evidence: Evidence, disease: str
) -> CounterfactualIntervention:
    """Switch off every disease except ``disease`` and every positively
    evidenced symptom's leak, leaving the kept disease as the only candidate
    cause of the positive symptoms in the counterfactual world."""
    return CounterfactualIntervention(
        diseases_off=tuple(d for d in net.disease_ids if d != disease),
        disabled_leaks=evidence.positive,
    )


def disablement_intervention(disease: str) -> CounterfactualIntervention:
    """Switch off only ``disease``; everything else keeps its mechanisms."""
    return CounterfactualIntervention(diseases_off=(disease,))


@dataclass(frozen=True)
class CounterfactualDistribution:
    """Distribution over counterfactual states of a fixed symptom list.

    ``table[code]`` is the probability of the joint state whose bit ``i``
    (value ``(code >> i) & 1``) is the counterfactual state of ``symptoms[i]``.
    """

    symptoms: tuple[str, ...]
    table: np.ndarray

    def prob_of(self, states: Mapping[str, int]) -> float:
        code = 0
        for i, s in enumerate(self.symptoms):
            if states[s]:
                code |= 1 << i
        return float(self.table[code])

    def marginal_one(self, symptom: str) -> float:
        i = self.symptoms.index(symptom)
        codes = np.arange(self.table.shape[0])
        on = ((codes >> i) & 1).astype(bool)
        return float(self.table[on].sum())

    def as_dict(self) -> dict[tuple[int, ...], float]:
        n = len(self.symptoms)
        out = {}
        for code, p in enumerate(self.table):
            out[tuple((code >> i) & 1 for i in range(n))] = float(p)
        return out


def _evidenced_symptoms(evidence: Evidence) -> tuple[str, ...]:
    return tuple(sorted(evidence.positive_set | evidence.negative_set))


# ---------------------------------------------------------------------------
# Literal engine: enumerate every latent assignment
# ---------------------------------------------------------------------------


def _chunk_bits(entries: tuple[LatentEntry, ...], idx: np.ndarray) -> list[np.ndarray]:
    return [((idx >> np.uint64(j)) & np.uint64(1)).astype(bool) for j in range(len(entries))]


def _chunk_weights(entries: tuple[LatentEntry, ...], bits: list[np.ndarray]) -> np.ndarray:
    w = np.ones(bits[0].shape[0] if bits else 1)
    for j, e in enumerate(entries):
        w *= np.where(bits[j], e.p_one, 1.0 - e.p_one)
    return w


def _world(
    net: NoisyOrNetwork,
    entries: tuple[LatentEntry, ...],
    bits: list[np.ndarray],
    *,
    diseases_off: frozenset[str] = frozenset(),
    disabled_leaks: frozenset[str] = frozenset(),
    n: int | None = None,
) -> dict[str, np.ndarray]:
    """Run the structural equations for one world on a chunk of latent draws."""
    pos = {(e.child, e.parent): j for j, e in enumerate(entries)}
    size = n if n is not None else bits[0].shape[0]
    vals: dict[str, np.ndarray] = {}
    for r in net.risk_factors:
        vals[r.id] = bits[pos[(r.id, "")]]
    for d in net.diseases:
        if d.id in diseases_off:
            vals[d.id] = np.zeros(size, dtype=bool)
            continue
        v = ~bits[pos[(d.id, "")]]
        for e in d.parents:
            v = v | (vals[e.parent] & ~bits[pos[(d.id, e.parent)]])
        vals[d.id] = v
    for s in net.symptoms:
        if s.id in disabled_leaks:
            v = np.zeros(size, dtype=bool)
        else:
            v = ~bits[pos[(s.id, "")]]
        for e in s.parents:
            v = v | (vals[e.parent] & ~bits[pos[(s.id, e.parent)]])
        vals[s.id] = v
    return vals


def _counterfactual_query_latent(
    net: NoisyOrNetwork,
    evidence: Evidence,
    intervention: CounterfactualIntervention,
    query: tuple[str, ...],
    max_latents: int,
) -> CounterfactualDistribution:
    entries = latent_entries(net)
    n_lat = len(entries)
    if n_lat > max_latents:
        raise CapExceededError(
            f"latent enumeration needs 2^{n_lat} assignments, cap is 2^{max_latents}"
        )
    total = 1 << n_lat
    chunk = min(total, 1 << _CHUNK_BITS)
    table = np.zeros(1 << len(query))
    mass = 0.0
    risk_map = evidence.risk_map
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        bits = _chunk_bits(entries, idx)
        w = _chunk_weights(entries, bits)
        factual = _world(net, entries, bits, n=idx.shape[0])
        keep = np.ones(idx.shape[0], dtype=bool)
        for rid, val in risk_map.items():
            keep &= factual[rid] == bool(val)
        for sid in evidence.positive:
            keep &= factual[sid]
        for sid in evidence.negative:
            keep &= ~factual[sid]
        w = np.where(keep, w, 0.0)
        mass += float(w.sum())
        cf = _world(
            net,
            entries,
            bits,
            diseases_off=intervention.diseases_off_set,
            disabled_leaks=intervention.disabled_leaks_set,
            n=idx.shape[0],
        )
        code = np.zeros(idx.shape[0], dtype=np.int64)
        for i, sid in enumerate(query):
            code |= cf[sid].astype(np.int64) << i
        table += np.bincount(code, weights=w, minlength=table.shape[0])
    if mass <= 0.0:
        raise ZeroLikelihoodError("evidence has probability zero under the model")
    return CounterfactualDistribution(symptoms=query, table=table / mass)


# ---------------------------------------------------------------------------
# Per-node latent blocks
# ---------------------------------------------------------------------------


def _off_block(leak: float, active_lams: tuple[float, ...]) -> float:
    """P(node = 0 | active parents) by summing over the node's latent block.

    The node is off exactly when the leak noise and every active edge noise are
    1; enumerating the block and filtering is deliberately literal.
    """
    if 1 + len(active_lams) > 20:
        raise CapExceededError(
            f"latent block of size 2^{1 + len(active_lams)} exceeds the 2^20 budget"
        )
    total = 0.0
    for combo in itertools.product((0, 1), repeat=1 + len(active_lams)):
        u_leak, *u_edges = combo
        if not u_leak or not all(u_edges):
            continue  # some cause fired: node is on
        p = leak if u_leak else 1.0 - leak
        for u, lam in zip(u_edges, active_lams):
            p *= lam if u else 1.0 - lam
        total += p
    return total


def _dual_block(
    leak: float,
    pairs: tuple[tuple[float, int, int], ...],
    leak_disabled: bool,
) -> dict[tuple[int, int], float]:
    """Joint distribution of (factual, counterfactual) states of one symptom.

    ``pairs`` holds (lam, d, d_star) for each parent edge: the edge failure
    probability and the parent's state in each world. Both worlds share the
    same edge and leak noises; the counterfactual drops the leak term when
    ``leak_disabled``. Parents off in both worlds contribute to neither OR, so
    their noises marginalise to 1 and are skipped.
    """
    live = [(lam, d, ds) for lam, d, ds in pairs if d or ds]
    if 1 + len(live) > 20:
        raise CapExceededError(
            f"latent block of size 2^{1 + len(live)} exceeds the 2^20 budget"
        )
    out = {(0, 0): 0.0, (0, 1): 0.0, (1, 0): 0.0, (1, 1): 0.0}
    for combo in itertools.product((0, 1), repeat=1 + len(live)):
        u_leak, *u_edges = combo
        p = leak if u_leak else 1.0 - leak
        s = not u_leak
        s_star = (not u_leak) and not leak_disabled
        for u, (lam, d, ds) in zip(u_edges, live):
            p *= lam if u else 1.0 - lam
            if d and not u:
                s = True
            if ds and not u:
                s_star = True
        out[(int(s), int(s_star))] += p
    return out


def dual_symptom_cpt(
    net: NoisyOrNetwork,
    symptom: str,
    parent_states: Mapping[str, int],
    kind: str,
    target: str,
) -> dict[tuple[int, int], float]:
    """Joint CPT of a symptom and its counterfactual copy under one measure's
    intervention.

    ``parent_states`` gives the factual state of every disease parent. For
    ``kind="sufficiency"`` the counterfactual keeps only ``target`` (all other
    parents forced off, leak removed); for ``kind="disablement"`` only
    ``target`` is forced off and the leak stays. Returns the four probabilities
    keyed by (factual, counterfactual) state; computed by enumerating the
    symptom's own noise block, never from any algebraic shortcut.
    """
    node = net.symptom_by_id[symptom]
    if kind == "sufficiency":
        pairs = tuple(
            (e.lam, int(parent_states[e.parent]),
             int(parent_states[e.parent]) if e.parent == target else 0)
            for e in node.parents
        )
        leak_disabled = True
    elif kind == "disablement":
        pairs = tuple(
            (e.lam, int(parent_states[e.parent]),
             0 if e.parent == target else int(parent_states[e.parent]))
            for e in node.parents
        )
        leak_disabled = False
    else:
        raise ValueError(f"unknown dual CPT kind {kind!r}")
    return _dual_block(node.leak, pairs, leak_disabled)


def dual_symptom_joint(
    net: NoisyOrNetwork,
    symptom: str,
    factual_states: Mapping[str, int],
    *,
    diseases_off: Iterable[str] = (),
    leak_disabled: bool = False,
) -> dict[tuple[int, int], float]:
    """Joint (factual, counterfactual) CPT of one symptom for an arbitrary
    disease-off intervention.

    Generalises ``dual_symptom_cpt`` beyond the two measure-specific shapes:
    the counterfactual parent state is the factual one with every disease in
    ``diseases_off`` forced to 0, and ``leak_disabled`` removes the leak term
    from the counterfactual equation only. Noise variables are shared between
    the worlds, which is what correlates the two coordinates.
    """
    node = net.symptom_by_id[symptom]
    off = set(diseases_off)
    pairs = tuple(
        (
            e.lam,
            int(factual_states[e.parent]),
            0 if e.parent in off else int(factual_states[e.parent]),
        )
        for e in node.parents
    )
    return _dual_block(node.leak, pairs, leak_disabled)


# ---------------------------------------------------------------------------
# Joint table over observed variables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JointTable:
    """Exact joint over all risks, diseases, and symptoms of a small net.

    ``probs[idx]`` is the probability of the assignment in which node
    ``node_ids[j]`` has value ``(idx >> j) & 1`` (first listed node in the
    lowest bit).
    """

    node_ids: tuple[str, ...]
    disease_ids: tuple[str, ...]
    probs: np.ndarray

    @cached_property
    def _pos(self) -> dict[str, int]:
        return {n: j for j, n in enumerate(self.node_ids)}

    def prob_of(self, assignment: Mapping[str, int]) -> float:
        idx = 0
        for n, v in assignment.items():
            if v:
                idx |= 1 << self._pos[n]
        return float(self.probs[idx])

    def iter_assignments(self) -> Iterator[tuple[dict[str, int], float]]:
        for idx, p in enumerate(self.probs):
            yield (
                {n: (idx >> j) & 1 for j, n in enumerate(self.node_ids)},
                float(p),
            )

    def _bit(self, node: str) -> np.ndarray:
        idx = np.arange(self.probs.shape[0], dtype=np.int64)
        return ((idx >> self._pos[node]) & 1).astype(bool)

    def likelihood_of(self, evidence: Evidence) -> float:
        mask = np.ones(self.probs.shape[0], dtype=bool)
        for rid, val in evidence.risks:
            mask &= self._bit(rid) == bool(val)
        for sid in evidence.positive:
            mask &= self._bit(sid)
        for sid in evidence.negative:
            mask &= ~self._bit(sid)
        return float(self.probs[mask].sum())

    def posteriors_given(self, evidence: Evidence) -> dict[str, float]:
        """P(D = 1 | evidence) for every disease in the table."""
        mask = np.ones(self.probs.shape[0], dtype=bool)
        for rid, val in evidence.risks:
            mask &= self._bit(rid) == bool(val)
        for sid in evidence.positive:
            mask &= self._bit(sid)
        for sid in evidence.negative:
            mask &= ~self._bit(sid)
        den = float(self.probs[mask].sum())
        if den <= 0.0:
            raise ZeroLikelihoodError("evidence has probability zero under the model")
        return {
            d: float(self.probs[mask & self._bit(d)].sum()) / den
            for d in self.disease_ids
        }


def enumerate_joint(net: NoisyOrNetwork, max_observed: int = 20) -> JointTable:
    """Exact joint over every observed variable, built one node at a time.

    Each node's conditional is obtained by summing its own latent block (see
    `_off_block`), then the table is extended assignment-wise. The table has
    2^(number of nodes) rows, capped by ``max_observed``.
    """
    node_ids = (*net.risk_ids, *net.disease_ids, *net.symptom_ids)
    n = len(node_ids)
    if n > max_observed:
        raise CapExceededError(f"joint table needs 2^{n} rows, cap is 2^{max_observed}")
    pos = {node: j for j, node in enumerate(node_ids)}
    probs = np.ones(1)
    off_cache: dict[tuple[str, tuple[int, ...]], float] = {}

    for layer, nodes in (("risk", net.risk_factors), ("disease", net.diseases), ("symptom", net.symptoms)):
        for node in nodes:
            if layer == "risk":
                p_on = np.full(probs.shape[0], node.prior)
            else:
                idx = np.arange(probs.shape[0], dtype=np.int64)
                if len(node.parents) > 12:
                    raise CapExceededError(
                        f"{node.id!r} has {len(node.parents)} parents; CPT table cap is 12"
                    )
                pa_states = [
                    ((idx >> pos[e.parent]) & 1).astype(np.int64) for e in node.parents
                ]
                pa_code = np.zeros(probs.shape[0], dtype=np.int64)
                for i, bits in enumerate(pa_states):
                    pa_code |= bits << i
                cpt_on = np.empty(1 << len(node.parents))
                for combo in range(1 << len(node.parents)):
                    key = (node.id, tuple((combo >> i) & 1 for i in range(len(node.parents))))
                    if key not in off_cache:
                        active = tuple(
                            e.lam
                            for i, e in enumerate(node.parents)
                            if (combo >> i) & 1
                        )
                        off_cache[key] = _off_block(node.leak, active)
                    cpt_on[combo] = 1.0 - off_cache[key]
                p_on = cpt_on[pa_code]
            probs = np.concatenate([probs * (1.0 - p_on), probs * p_on])

    return JointTable(node_ids=node_ids, disease_ids=net.disease_ids, probs=probs)


# ---------------------------------------------------------------------------
# Factored engine
# ---------------------------------------------------------------------------


def _risk_table(net: NoisyOrNetwork, risk_map: Mapping[str, int]) -> tuple[np.ndarray, np.ndarray]:
    """All risk completions consistent with the evidence, with prior weights.

    Observed risks are pinned (weight contribution 1, i.e. the table is
    conditional on the risk evidence); unobserved risks branch on their prior.
    Risk j occupies bit/column j in declaration order.
    """
    n_unobs = sum(1 for r in net.risk_factors if r.id not in risk_map)
    if n_unobs > 16:
        raise CapExceededError(f"2^{n_unobs} risk completions exceed the 2^16 budget")
    weights = np.ones(1)
    states = np.zeros((1, 0), dtype=np.int8)
    for r in net.risk_factors:
        if r.id in risk_map:
            v = int(risk_map[r.id])
            states = np.concatenate([states, np.full((states.shape[0], 1), v, dtype=np.int8)], axis=1)
        else:
            states = np.concatenate(
                [
                    np.concatenate([states, np.zeros((states.shape[0], 1), dtype=np.int8)], axis=1),
                    np.concatenate([states, np.ones((states.shape[0], 1), dtype=np.int8)], axis=1),
                ],
                axis=0,
            )
            weights = np.concatenate([weights * (1.0 - r.prior), weights * r.prior])
    return weights, states


def _disease_state_weights(
    net: NoisyOrNetwork,
    risk_weights: np.ndarray,
    risk_states: np.ndarray,
) -> np.ndarray:
    """w[dcode] = P(disease layer = dcode | risk evidence), disease j at bit j."""
    n_d = len(net.diseases)
    if n_d > 12:
        raise CapExceededError(f"2^{n_d} disease states exceed the 2^12 budget")
    out = np.zeros(1 << n_d)
    r_index = net.risk_index
    off_cache: dict[tuple[str, tuple[int, ...]], float] = {}
    for w_r, row in zip(risk_weights, risk_states):
        vec = np.ones(1)
        for d in net.diseases:
            key = (d.id, tuple(int(row[r_index[e.parent]]) for e in d.parents))
            if key not in off_cache:
                active = tuple(
                    e.lam for i, e in enumerate(d.parents) if key[1][i]
                )
                off_cache[key] = _off_block(d.leak, active)
            p_on = 1.0 - off_cache[key]
            vec = np.concatenate([vec * (1.0 - p_on), vec * p_on])
        out += w_r * vec
    return out


def _counterfactual_query_factored(
    net: NoisyOrNetwork,
    evidence: Evidence,
    intervention: CounterfactualIntervention,
    query: tuple[str, ...],
) -> CounterfactualDistribution:
    risk_weights, risk_states = _risk_table(net, evidence.risk_map)
    w_d = _disease_state_weights(net, risk_weights, risk_states)
    n_d = len(net.diseases)
    d_index = net.disease_index
    evidenced = _evidenced_symptoms(evidence)
    pos_set = evidence.positive_set
    off_set = intervention.diseases_off_set
    leak_off = intervention.disabled_leaks_set

    dual_cache: dict[tuple, dict[tuple[int, int], float]] = {}
    joint = w_d.reshape(-1, 1).copy()
    query_set = set(query)
    if query_set - set(evidenced):
        raise ValueError("query symptoms must be evidenced symptoms")

    for sid in evidenced:
        node = net.symptom_by_id[sid]
        s_obs = 1 if sid in pos_set else 0
        col = np.empty((1 << n_d, 2))
        for dcode in range(1 << n_d):
            pairs = tuple(
                (
                    e.lam,
                    (dcode >> d_index[e.parent]) & 1,
                    0 if e.parent in off_set else (dcode >> d_index[e.parent]) & 1,
                )
                for e in node.parents
            )
            key = (sid, pairs)
            if key not in dual_cache:
                dual_cache[key] = _dual_block(node.leak, pairs, sid in leak_off)
            tbl = dual_cache[key]
            col[dcode, 0] = tbl[(s_obs, 0)]
            col[dcode, 1] = tbl[(s_obs, 1)]
        if sid in query_set:
            joint = (joint[:, :, None] * col[:, None, :]).reshape(joint.shape[0], -1)
        else:
            joint = joint * col.sum(axis=1, keepdims=True)

    # Column bit i of the flattened joint corresponds to query symbol... the
    # reshape above appends each new symptom as the *lowest* varying axis, so
    # the first queried symptom ends up in the highest bit. Reorder to the
    # bit-i-is-symptoms[i] convention shared with the literal engine.
    ordered = [s for s in evidenced if s in query_set]
    table_raw = joint.sum(axis=0)
    q = len(ordered)
    table = np.zeros(1 << q)
    for code_raw in range(1 << q):
        code = 0
        for i in range(q):
            # in the raw layout, symptom ordered[i] sits at bit (q - 1 - i)
            if (code_raw >> (q - 1 - i)) & 1:
                code |= 1 << query.index(ordered[i])
        table[code] = table_raw[code_raw]
    mass = float(table.sum())
    if mass <= 0.0:
        raise ZeroLikelihoodError("evidence has probability zero under the model")
    return CounterfactualDistribution(symptoms=query, table=table / mass)


def counterfactual_query(
    net: NoisyOrNetwork,
    evidence: Evidence,
    intervention: CounterfactualIntervention,
    *,
    query_symptoms: tuple[str, ...] | None = None,
    method: str = "factored",
    max_latents: int = 24,
) -> CounterfactualDistribution:
    """P(counterfactual symptom states | evidence, intervention), exactly.

    The three-step semantics (condition the latents on the evidence, apply the
    surgery, re-run the equations) is followed literally by ``method="latent"``
    and in per-node factored form by ``method="factored"``; both are exact.
    ``query_symptoms`` defaults to all evidenced symptoms.
    """
    check_evidence(net, evidence)
    for d in intervention.diseases_off:
        if d not in net.disease_by_id:
            raise ValueError(f"intervention on unknown disease {d!r}")
    for s in intervention.disabled_leaks:
        if s not in net.symptom_by_id:
            raise ValueError(f"leak intervention on unknown symptom {s!r}")
    query = query_symptoms if query_symptoms is not None else _evidenced_symptoms(evidence)
    if method == "latent":
        return _counterfactual_query_latent(net, evidence, intervention, query, max_latents)
    if method == "factored":
        return _counterfactual_query_factored(net, evidence, intervention, query)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Definition-level measures
# ---------------------------------------------------------------------------


def measure_oracle(
    net: NoisyOrNetwork,
    evidence: Evidence,
    disease: str,
    kind: str,
    *,
    method: str = "factored",
    max_latents: int = 24,
) -> float:
    """Expected counterfactual symptom count straight from the definitions.

    ``kind="sufficiency"``: expected number of positively evidenced symptoms
    still on after switching off every other disease and the positive symptoms'
    leaks. ``kind="disablement"``: expected number of positively evidenced
    symptoms switched off by removing the disease alone. Both are plain
    expectations under `counterfactual_query`; nothing is simplified.
    """
    if disease not in net.disease_by_id:
        raise ValueError(f"unknown disease {disease!r}")
    if kind == "sufficiency":
        intervention = sufficiency_intervention(net, evidence, disease)
    elif kind == "disablement":
        intervention = disablement_intervention(disease)
    else:
        raise ValueError(f"unknown measure kind {kind!r}")
    if not evidence.positive:
        return 0.0
    dist = counterfactual_query(
        net, evidence, intervention, method=method, max_latents=max_latents
    )
    pos_mask = 0
    for i, sid in enumerate(dist.symptoms):
        if sid in evidence.positive_set:
            pos_mask |= 1 << i
    codes = np.arange(dist.table.shape[0], dtype=np.int64)
    on_counts = np.zeros(dist.table.shape[0], dtype=np.int64)
    rem = codes & pos_mask
    while rem.any():
        on_counts += rem & 1
        rem >>= 1
    if kind == "sufficiency":
        weights = on_counts
    else:
        weights = len(evidence.positive) - on_counts
    return float((dist.table * weights).sum())


def posterior_oracle(net: NoisyOrNetwork, evidence: Evidence, disease: str) -> float:
    """P(disease = 1 | evidence) via the factored engine (no subset walk)."""
    check_evidence(net, evidence)
    if disease not in net.disease_by_id:
        raise ValueError(f"unknown disease {disease!r}")
    risk_weights, risk_states = _risk_table(net, evidence.risk_map)
    w_d = _disease_state_weights(net, risk_weights, risk_states)
    n_d = len(net.diseases)
    d_index = net.disease_index
    lik_vec = np.ones(1 << n_d)
    off_cache: dict[tuple, float] = {}
    for sid in _evidenced_symptoms(evidence):
        node = net.symptom_by_id[sid]
        want_on = sid in evidence.positive_set
        for dcode in range(1 << n_d):
            key = (sid, tuple((dcode >> d_index[e.parent]) & 1 for e in node.parents))
            if key not in off_cache:
                active = tuple(e.lam for i, e in enumerate(node.parents) if key[1][i])
                off_cache[key] = _off_block(node.leak, active)
            off = off_cache[key]
            lik_vec[dcode] *= (1.0 - off) if want_on else off
    num = 0.0
    den = 0.0
    bit = d_index[disease]
    for dcode in range(1 << n_d):
        contrib = w_d[dcode] * lik_vec[dcode]
        den += contrib
        if (dcode >> bit) & 1:
            num += contrib
    if den <= 0.0:
        raise ZeroLikelihoodError("evidence has probability zero under the model")
    return num / den
