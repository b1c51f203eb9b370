"""Monte Carlo estimation of posteriors and counterfactual measures.

Likelihood weighting with the ancestral (prior) proposal: sample risk factors
from their priors (observed ones pinned to the evidence), sample diseases
from their risk-conditional noisy-OR probabilities, and weight each sample by
the probability of the symptom evidence given the sampled diseases. The
symptom layer itself is never sampled — given the diseases, the per-symptom
counterfactual quantities integrate in closed form over the shared edge and
leak noises:

* disablement, positive symptom S:  P(S off after curing k | S on, d) =
  (off_wo_k - off) / (1 - off), where ``off`` is P(S = 0 | d) and
  ``off_wo_k`` removes disease k's failure factor — if all causes of S fail
  without k's edge, only that edge can have fired factually;
* sufficiency, positive symptom S:  P(S stays on | S on, d) =
  d_k * (1 - lam_kS) / (1 - off) — with every other cause switched off and
  the leak disabled, S stays on exactly when k's edge fired, which also
  guarantees S was factually on.

Summing over the positive symptoms gives the per-sample integrand g; the
estimate is the self-normalised ratio  sum(w*g) / sum(w)  with a delta-method
standard error and an effective-sample-size diagnostic.

Determinism contract: a fixed seed fully determines the result. Draws are
consumed chunk by chunk (chunk size ``CHUNK``, a fixed constant that is part
of the contract — changing it changes the stream) in declaration order:
first one uniform block per unobserved risk, then one per disease. The
generator is seeded from ``SeedSequence([seed, _SEED_PURPOSE])`` so the same
user seed never collides with other seeded components of this package.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ZeroLikelihoodError
from .network import Evidence, NoisyOrNetwork, check_evidence

__all__ = ["CHUNK", "McEstimate", "mc_estimate_measure"]

CHUNK = 1 << 16

_SEED_PURPOSE = 0x4D43  # disambiguates this module's streams from other seeded code

_KINDS = ("posterior", "sufficiency", "disablement")


class McEstimate(NamedTuple):
    """Estimate with uncertainty; unpacks as (value, stderr, ...)."""

    value: float
    stderr: float
    n_samples: int
    ess: float
    low_ess: bool


def mc_estimate_measure(
    net: NoisyOrNetwork,
    evidence: Evidence,
    disease: str,
    kind: str,
    n_samples: int,
    seed: int,
) -> McEstimate:
    """Estimate one disease's posterior / sufficiency / disablement.

    ``low_ess`` is set when the effective sample size ``(sum w)^2 / sum w^2``
    falls below max(50, n_samples / 1000): the weights are then so skewed
    that the reported standard error itself is unreliable. All sample weights
    zero raises ZeroLikelihoodError (the evidence never happened in
    ``n_samples`` proposals — likely impossible under the model).
    """
    check_evidence(net, evidence)
    if disease not in net.disease_by_id:
        raise ValueError(f"unknown disease id {disease!r}")
    if kind not in _KINDS:
        raise ValueError(f"unknown measure kind {kind!r}; expected one of {_KINDS}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")

    rng = np.random.default_rng(np.random.SeedSequence([seed, _SEED_PURPOSE]))
    risk_map = evidence.risk_map
    k_id = disease
    k_index = net.disease_index[disease]
    evidenced = [(sid, 1) for sid in evidence.positive] + [
        (sid, 0) for sid in evidence.negative
    ]

    s_w = 0.0
    s_wg = 0.0
    s_w2 = 0.0
    s_w2g = 0.0
    s_w2g2 = 0.0

    done = 0
    while done < n_samples:
        c = min(CHUNK, n_samples - done)
        done += c

        risk_state: dict[str, np.ndarray] = {}
        for r in net.risk_factors:
            if r.id in risk_map:
                risk_state[r.id] = np.full(c, float(risk_map[r.id]))
            else:
                risk_state[r.id] = (rng.random(c) < r.prior).astype(float)

        d_state = np.empty((len(net.diseases), c))
        for j, d in enumerate(net.diseases):
            off = np.full(c, d.leak)
            for e in d.parents:
                x = risk_state[e.parent]
                off *= (1.0 - x) + x * e.lam
            d_state[j] = (rng.random(c) < 1.0 - off).astype(float)

        w = np.ones(c)
        for sid, v in evidenced:
            node = net.symptom_by_id[sid]
            off = np.full(c, node.leak)
            for e in node.parents:
                x = d_state[net.disease_index[e.parent]]
                off *= (1.0 - x) + x * e.lam
            w *= (1.0 - off) if v else off

        if kind == "posterior":
            g = d_state[k_index].copy()
        else:
            g = np.zeros(c)
            dk = d_state[k_index]
            for sid in evidence.positive:
                node = net.symptom_by_id[sid]
                lam_k = node.lam_by_parent.get(k_id, 1.0)
                off = np.full(c, node.leak)
                for e in node.parents:
                    x = d_state[net.disease_index[e.parent]]
                    off *= (1.0 - x) + x * e.lam
                on = 1.0 - off
                if kind == "sufficiency":
                    num = dk * (1.0 - lam_k)
                else:  # disablement: remove k's factor where k is active
                    off_wo_k = np.where(dk > 0.0, off / lam_k, off)
                    num = off_wo_k - off
                g += np.where(on > 0.0, num / np.where(on > 0.0, on, 1.0), 0.0)

        s_w += float(w.sum())
        s_wg += float((w * g).sum())
        w2 = w * w
        s_w2 += float(w2.sum())
        s_w2g += float((w2 * g).sum())
        s_w2g2 += float((w2 * g * g).sum())

    if s_w <= 0.0:
        raise ZeroLikelihoodError(
            "all sample weights are zero; evidence unreachable from the proposal"
        )
    value = s_wg / s_w
    var = (s_w2g2 - 2.0 * value * s_w2g + value * value * s_w2) / (s_w * s_w)
    stderr = float(np.sqrt(max(0.0, var)))
    ess = (s_w * s_w) / s_w2 if s_w2 > 0.0 else 0.0
    low_ess = ess < max(50.0, n_samples / 1000.0)
    return McEstimate(
        value=float(value),
        stderr=stderr,
        n_samples=int(n_samples),
        ess=float(ess),
        low_ess=bool(low_ess),
    )
