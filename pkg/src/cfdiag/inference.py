"""Exact inference for three-layer noisy-OR networks.

The model admits a closed-form elimination of the disease layer. Conditioning
on a joint state of the risk factors, diseases are independent Bernoulli
variables and each symptom is a noisy-OR of its disease parents, so the
probability that a *set of symptoms is simultaneously off* factorises into one
term per disease. Positively evidenced symptoms are handled by
inclusion-exclusion over subsets of the positive set: for evidence
``S_+`` on, ``S_-`` off,

    P(S_+ on, S_- off | R)
      = sum over Z subset of S_+ of (-1)^|Z| * P(Z off, S_- off | R),

and every term in the sum is a product over diseases. Walking the subsets in
Gray-code order keeps each step O(diseases). The same walk, with one extra
multiplier per disease, also yields the per-disease numerators needed for
posteriors and for the two counterfactual ranking measures, so a single pass
serves all downstream queries.

Unobserved risk factors are marginalised by enumerating their joint states
("completions"); observed ones are clamped, so every result is conditional on
the observed risks.

Numerics: terms alternate in sign, so sums use compensated (Kahan)
accumulation, processed in fixed-size blocks of consecutive subset indices.
Blocks are combined in index order no matter how many threads ran them, which
makes results independent of ``threads``. If any running product underflows
below 1e-300 the walk is rerun in log space with per-term signed
accumulation; results are then carried as (mantissa, log-scale) pairs whose
scales cancel in ratios, so posteriors remain accurate even when the evidence
likelihood itself is far below the smallest normal float.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .errors import CapExceededError, NumericsError, ZeroLikelihoodError
from .network import Evidence, NoisyOrNetwork, check_evidence
from .subsets import KahanScalar, KahanVector, SubsetTermCache

__all__ = [
    "InferenceSettings",
    "DEFAULT_SETTINGS",
    "ScaledValue",
    "WalkResult",
    "walk_evidence",
    "evidence_likelihood",
    "disease_posterior",
    "joint_off_marginal",
    "bounded_value",
]

_TINY = 1e-300  # running-product underflow threshold; mirrors _kernels._TINY
_ZERO_REL = 1e-12  # |likelihood| <= this fraction of the largest term => zero
_LIK_SLACK = 1e-12  # tolerated numeric excursion of a likelihood outside [0, 1]
_CLAMP_SLACK = 1e-9  # tolerated excursion of a ratio outside its exact bounds


# ---------------------------------------------------------------------------
# Settings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InferenceSettings:
    """Tuning and safety limits for the exact subset walk.

    ``max_positive`` caps the number of positively evidenced symptoms (the
    walk is O(2^m)); ``max_unobserved_risks`` caps the marginalised risk
    completions the same way. ``threads`` > 1 farms subset blocks out to a
    thread pool (the JIT kernel releases the GIL); 0 means "use the
    CFDIAG_THREADS environment variable, else 1". ``kernel`` selects the
    implementation: "python" (reference), "numba" (JIT), or "auto" (JIT for
    large workloads when available). ``divide_free`` and ``refresh_every``
    control drift suppression in the incremental products, and ``block_bits``
    sets the 2^block_bits subset block size that is both the threading grain
    and the deterministic accumulation unit.
    """

    max_positive: int = 25
    max_unobserved_risks: int = 20
    threads: int = 0
    kernel: str = "auto"
    divide_free: bool = False
    refresh_every: int = 1024
    block_bits: int = 14

    def __post_init__(self) -> None:
        if self.kernel not in ("auto", "python", "numba"):
            raise ValueError(f"kernel must be auto|python|numba, got {self.kernel!r}")
        if self.block_bits < 1:
            raise ValueError("block_bits must be >= 1")
        if self.refresh_every < 1:
            raise ValueError("refresh_every must be >= 1")

    def effective_threads(self) -> int:
        if self.threads > 0:
            return self.threads
        env = os.environ.get("CFDIAG_THREADS", "").strip()
        if env:
            try:
                return max(1, int(env))
            except ValueError:
                raise ValueError(f"CFDIAG_THREADS must be an integer, got {env!r}") from None
        return 1


DEFAULT_SETTINGS = InferenceSettings()

# Auto mode switches to the JIT kernel once completions * subsets * diseases
# reaches this; below it the numpy reference path is faster than a kernel call.
_AUTO_KERNEL_WORK = 4096


# ---------------------------------------------------------------------------
# Scaled values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledValue:
    """A float carried as ``mantissa * exp(log_scale)``.

    The linear walk produces plain floats (``log_scale == 0``); the log-space
    fallback produces genuinely scaled values. Ratios cancel the scales first,
    so quantities like posteriors stay well conditioned even when numerator
    and denominator are both far outside normal float range.
    """

    mantissa: float
    log_scale: float = 0.0

    def to_float(self) -> float:
        if self.mantissa == 0.0:
            return 0.0
        if self.log_scale == 0.0:
            return self.mantissa
        l = math.log(abs(self.mantissa)) + self.log_scale
        if l < -745.0:
            return math.copysign(0.0, self.mantissa)
        if l > 709.0:
            return math.copysign(math.inf, self.mantissa)
        return math.copysign(math.exp(l), self.mantissa)

    def ratio_to(self, denom: "ScaledValue") -> float:
        """self / denom as a plain float; exact division when scales match."""
        if denom.mantissa == 0.0:
            raise ZeroDivisionError("ratio_to with zero denominator")
        q = self.mantissa / denom.mantissa
        shift = self.log_scale - denom.log_scale
        if shift == 0.0 or q == 0.0:
            return q
        l = math.log(abs(q)) + shift
        if l < -745.0:
            return math.copysign(0.0, q)
        if l > 709.0:
            return math.copysign(math.inf, q)
        return math.copysign(math.exp(l), q)


def bounded_value(value: float, lo: float, hi: float, label: str) -> float:
    """Clamp tiny numeric excursions outside [lo, hi]; reject large ones.

    Exact quantities (probabilities, the ranking measures) have hard bounds;
    floating error may leave a result a hair outside them. Within
    ``_CLAMP_SLACK`` of a bound the value is snapped to it, further out the
    result is evidence of a real defect and raises NumericsError.
    """
    if lo <= value <= hi:
        return value
    if lo - _CLAMP_SLACK <= value < lo:
        return lo
    if hi < value <= hi + _CLAMP_SLACK:
        return hi
    raise NumericsError(f"{label} = {value!r} outside [{lo}, {hi}] by more than {_CLAMP_SLACK}")


# ---------------------------------------------------------------------------
# Walk preparation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _WalkPrep:
    """All arrays the walk needs, in canonical (sorted-id) order."""

    positive: tuple[str, ...]
    negative: tuple[str, ...]
    disease_ids: tuple[str, ...]
    lam: np.ndarray  # (n_d, m) edge failure probs disease -> positive symptom
    leak: np.ndarray  # (m,) leak failure probs of the positive symptoms
    one_minus: np.ndarray  # (n_d, m) = 1 - lam
    gamma_inc: np.ndarray  # (n_d, m) = 1 - 1/lam
    w_base: np.ndarray  # (n_d,) product of edge failures over negative symptoms
    leak_base: float  # product of leak failures over negative symptoms
    log_w_base: np.ndarray  # (n_d,) same, summed in log space
    log_leak_base: float
    weights: np.ndarray  # (n_c,) probability of each unobserved-risk completion
    p_mat: np.ndarray  # (n_c, n_d) disease activation prob under each completion

    @property
    def m(self) -> int:
        return self.leak.shape[0]

    @property
    def n_d(self) -> int:
        return self.lam.shape[0]


def _completion_table(
    net: NoisyOrNetwork, risk_map: Mapping[str, int], max_unobserved: int
) -> tuple[np.ndarray, np.ndarray]:
    """Enumerate unobserved-risk joint states.

    Returns (weights, p_mat): the probability of each completion given the
    (independent) risk priors, and each disease's activation probability under
    it. Completion c's bit i (least significant first) is the state of the
    i-th unobserved risk in declaration order.
    """
    unobserved = [r for r in net.risk_factors if r.id not in risk_map]
    if len(unobserved) > max_unobserved:
        raise CapExceededError(
            f"{len(unobserved)} unobserved risk factors exceed the completion cap "
            f"{max_unobserved}; observe more risks or raise max_unobserved_risks"
        )
    off = np.empty(len(net.diseases))
    for j, d in enumerate(net.diseases):
        prod = d.leak
        for rid, lam in d.lam_by_parent.items():
            if risk_map.get(rid) == 1:
                prod *= lam
        off[j] = prod
    offs = off[None, :]
    weights = np.ones(1)
    for r in unobserved:
        lam_row = np.array(
            [d.lam_by_parent.get(r.id, 1.0) for d in net.diseases]
        )
        offs = np.concatenate([offs, offs * lam_row[None, :]], axis=0)
        weights = np.concatenate([weights * (1.0 - r.prior), weights * r.prior])
    return weights, 1.0 - offs


def _prepare_walk(
    net: NoisyOrNetwork, evidence: Evidence, settings: InferenceSettings
) -> _WalkPrep:
    check_evidence(net, evidence)
    positive = evidence.positive
    negative = evidence.negative
    if len(positive) > settings.max_positive:
        raise CapExceededError(
            f"{len(positive)} positive symptoms exceed the subset-walk cap "
            f"{settings.max_positive} (2^m growth); raise max_positive deliberately"
        )
    diseases = net.diseases
    n_d = len(diseases)
    m = len(positive)
    lam = np.ones((n_d, m))
    for b, sid in enumerate(positive):
        by_parent = net.symptom_by_id[sid].lam_by_parent
        for j, d in enumerate(diseases):
            lam[j, b] = by_parent.get(d.id, 1.0)
    leak = np.array([net.symptom_by_id[s].leak for s in positive])
    w_base = np.ones(n_d)
    log_w_base = np.zeros(n_d)
    leak_base = 1.0
    log_leak_base = 0.0
    for sid in negative:
        sym = net.symptom_by_id[sid]
        leak_base *= sym.leak
        log_leak_base += math.log(sym.leak)
        by_parent = sym.lam_by_parent
        for j, d in enumerate(diseases):
            lv = by_parent.get(d.id)
            if lv is not None:
                w_base[j] *= lv
                log_w_base[j] += math.log(lv)
    weights, p_mat = _completion_table(net, evidence.risk_map, settings.max_unobserved_risks)
    return _WalkPrep(
        positive=positive,
        negative=negative,
        disease_ids=net.disease_ids,
        lam=lam,
        leak=leak,
        one_minus=1.0 - lam,
        gamma_inc=1.0 - 1.0 / lam,
        w_base=w_base,
        leak_base=leak_base,
        log_w_base=log_w_base,
        log_leak_base=log_leak_base,
        weights=weights,
        p_mat=p_mat,
    )


# ---------------------------------------------------------------------------
# Walk result
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WalkResult:
    """Everything one evidence walk produces.

    ``likelihood`` is P(symptom evidence | observed risks). The numerator
    tuples are per-disease (in ``disease_ids`` order): joint probability of
    evidence and disease for posteriors, and the signed correction sums whose
    ratios to the likelihood give the two counterfactual ranking measures.
    ``engine`` records which implementation produced the numbers ("python",
    "numba", or "log").
    """

    positive: tuple[str, ...]
    disease_ids: tuple[str, ...]
    likelihood: ScaledValue
    max_term: ScaledValue
    posterior_numerators: tuple[ScaledValue, ...]
    sufficiency_numerators: tuple[ScaledValue, ...]
    disablement_numerators: tuple[ScaledValue, ...]
    engine: str

    def index_of(self, disease_id: str) -> int:
        try:
            return self.disease_ids.index(disease_id)
        except ValueError:
            raise ValueError(f"unknown disease id {disease_id!r}") from None

    def zero_likelihood(self) -> bool:
        """True when the evidence has (numerically) zero probability.

        The alternating sum cancels to a value at most ``_ZERO_REL`` times its
        largest single term, i.e. below the resolution the arithmetic can
        certify as nonzero.
        """
        if self.max_term.mantissa == 0.0:
            return True
        return abs(self.likelihood.ratio_to(self.max_term)) <= _ZERO_REL


class _UnderflowSignal(Exception):
    """Internal: a running product fell below _TINY; rerun in log space."""


# ---------------------------------------------------------------------------
# Linear walks (reference Python, JIT)
# ---------------------------------------------------------------------------


def _block_ranges(m: int, block_bits: int) -> list[tuple[int, int]]:
    total = 1 << m
    size = 1 << min(block_bits, m)
    return [(s, min(s + size, total)) for s in range(0, total, size)]


@dataclass
class _LinearPartial:
    lik: float
    max_term: float
    post: np.ndarray
    suff: np.ndarray
    dis: np.ndarray


def _walk_python_block(
    prep: _WalkPrep, settings: InferenceSettings, unit: bool, start: int, stop: int
) -> _LinearPartial:
    n_d = prep.n_d
    lik = KahanScalar()
    post = KahanVector(n_d)
    suff = KahanVector(n_d)
    dis = KahanVector(n_d)
    max_term = 0.0
    ones = np.ones(n_d)
    cache = SubsetTermCache(
        prep.lam,
        prep.leak,
        prep.w_base,
        prep.leak_base,
        divide_free=settings.divide_free,
        refresh_every=settings.refresh_every,
    )
    for c in range(len(prep.weights)):
        w_cc = prep.weights[c]
        if w_cc == 0.0:
            continue
        p = prep.p_mat[c]
        q = 1.0 - p
        cache.seek(start)
        i = start
        while True:
            W = cache.products
            if n_d and W.min() < _TINY:
                raise _UnderflowSignal
            B = p * W
            A = q + B
            prodA = float(A.prod())
            if cache.leak_product < _TINY or prodA < _TINY:
                raise _UnderflowSignal
            t = cache.leak_product * prodA * w_cc
            if t > max_term:
                max_term = t
            st = cache.sign * t
            lik.add(st)
            if n_d:
                tk = st * (B / A)
                post.add(tk)
                if unit:
                    suff.add(tk * ones)
                    dis.add(tk * ones)
                else:
                    suff.add(tk * cache.tau)
                    dis.add(tk * cache.gamma)
            i += 1
            if i >= stop:
                break
            cache.advance(i)
    return _LinearPartial(lik.total, max_term, post.total, suff.total, dis.total)


def _walk_numba_block(
    prep: _WalkPrep, settings: InferenceSettings, unit: bool, start: int, stop: int
) -> _LinearPartial:
    out_scalar = np.zeros(2)
    out_post = np.zeros(prep.n_d)
    out_suff = np.zeros(prep.n_d)
    out_dis = np.zeros(prep.n_d)
    status = _kernels.gray_block(
        start,
        stop,
        prep.lam,
        prep.leak,
        prep.one_minus,
        prep.gamma_inc,
        prep.w_base,
        prep.leak_base,
        prep.p_mat,
        prep.weights,
        unit,
        settings.divide_free,
        settings.refresh_every,
        out_scalar,
        out_post,
        out_suff,
        out_dis,
    )
    if status != 0:
        raise _UnderflowSignal
    return _LinearPartial(out_scalar[0], out_scalar[1], out_post, out_suff, out_dis)


def _walk_linear(
    prep: _WalkPrep, settings: InferenceSettings, unit: bool, engine: str
) -> WalkResult:
    runner = _walk_numba_block if engine == "numba" else _walk_python_block
    blocks = _block_ranges(prep.m, settings.block_bits)
    threads = settings.effective_threads()
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(
                pool.map(lambda se: runner(prep, settings, unit, se[0], se[1]), blocks)
            )
    else:
        partials = [runner(prep, settings, unit, s, e) for s, e in blocks]
    # Combine in block-index order: results are identical for any thread count.
    lik = KahanScalar()
    post = KahanVector(prep.n_d)
    suff = KahanVector(prep.n_d)
    dis = KahanVector(prep.n_d)
    max_term = 0.0
    for part in partials:
        lik.add(part.lik)
        post.add(part.post)
        suff.add(part.suff)
        dis.add(part.dis)
        if part.max_term > max_term:
            max_term = part.max_term
    return WalkResult(
        positive=prep.positive,
        disease_ids=prep.disease_ids,
        likelihood=ScaledValue(lik.total),
        max_term=ScaledValue(max_term),
        posterior_numerators=tuple(ScaledValue(v) for v in post.total),
        sufficiency_numerators=tuple(ScaledValue(v) for v in suff.total),
        disablement_numerators=tuple(ScaledValue(v) for v in dis.total),
        engine=engine,
    )


# ---------------------------------------------------------------------------
# Log-space walk
# ---------------------------------------------------------------------------


class _SignedLogAcc:
    """Accumulates sum_i factor_i * exp(log_mag_i) with dynamic rescaling.

    State is (shift, pos, neg): the running value is
    (pos - neg) * exp(shift). Positive and negative mass are kept separately
    so the alternating series cancels once, at the end, instead of on every
    add. Chunks arrive as arrays; within a chunk the reduction is a numpy sum
    (deterministic for fixed shapes), and chunks are combined in walk order.
    """

    def __init__(self, n: int) -> None:
        self.shift = np.full(n, -np.inf)
        self.pos = np.zeros(n)
        self.neg = np.zeros(n)

    def add_chunk(self, log_mag: np.ndarray, factor: np.ndarray) -> None:
        factor = np.broadcast_to(factor, log_mag.shape)
        with np.errstate(divide="ignore"):
            log_c = log_mag + np.log(np.abs(factor))
        log_c = np.where(factor == 0.0, -np.inf, log_c)
        chunk_max = log_c.max(axis=0)
        new_shift = np.maximum(self.shift, chunk_max)
        finite = new_shift != -np.inf
        ns = np.where(finite, new_shift, 0.0)
        scale_old = np.where(self.shift == -np.inf, 0.0, np.exp(self.shift - ns))
        rel = np.exp(log_c - ns[None, :])
        self.pos = self.pos * scale_old + np.where(factor > 0.0, rel, 0.0).sum(axis=0)
        self.neg = self.neg * scale_old + np.where(factor < 0.0, rel, 0.0).sum(axis=0)
        self.shift = np.where(finite, ns, -np.inf)

    def values(self) -> list[ScaledValue]:
        out = []
        for p, n, s in zip(self.pos, self.neg, self.shift):
            if s == -np.inf:
                out.append(ScaledValue(0.0))
            else:
                out.append(ScaledValue(float(p - n), float(s)))
        return out


def _walk_log(prep: _WalkPrep, settings: InferenceSettings, unit: bool) -> WalkResult:
    """From-scratch log-space evaluation; used only after underflow.

    No incremental products: every subset's terms are recomputed directly
    from sums of logs, which cannot underflow. Subsets are processed in the
    same block order as the linear walks.
    """
    m, n_d = prep.m, prep.n_d
    with np.errstate(divide="ignore"):
        log_lam = np.log(prep.lam)  # lam in (0,1]; validation rejects 0
        log_leak = np.log(prep.leak)
    tau_full = prep.one_minus.sum(axis=1)
    acc_lik = _SignedLogAcc(1)
    acc_post = _SignedLogAcc(n_d)
    acc_suff = _SignedLogAcc(n_d)
    acc_dis = _SignedLogAcc(n_d)
    max_log = -np.inf
    bit_cols = np.arange(m)
    for start, stop in _block_ranges(m, settings.block_bits):
        idx = np.arange(start, stop)
        masks = idx ^ (idx >> 1)
        bits = ((masks[:, None] >> bit_cols[None, :]) & 1).astype(float)  # (c, m)
        sign = np.where(bits.sum(axis=1) % 2 == 0, 1.0, -1.0)[:, None]  # (c, 1)
        logW = prep.log_w_base[None, :] + bits @ log_lam.T  # (c, n_d)
        log_leak_sum = prep.log_leak_base + bits @ log_leak  # (c,)
        if unit:
            tau_c = np.ones((len(idx), n_d))
            gamma_c = np.ones((len(idx), n_d))
        else:
            tau_c = tau_full[None, :] - bits @ prep.one_minus.T
            gamma_c = bits @ prep.gamma_inc.T
        for c in range(len(prep.weights)):
            w_cc = prep.weights[c]
            if w_cc == 0.0:
                continue
            p = prep.p_mat[c]
            with np.errstate(divide="ignore"):
                log_p = np.log(p)
                log_1mp = np.log1p(-p)
            logA = np.logaddexp(log_1mp[None, :], log_p[None, :] + logW)  # (c, n_d)
            log_t = log_leak_sum + logA.sum(axis=1) + math.log(w_cc)  # (c,)
            if len(log_t):
                max_log = max(max_log, float(log_t.max()))
            log_tk = log_t[:, None] - logA + (log_p[None, :] + logW)
            acc_lik.add_chunk(log_t[:, None], sign)
            acc_post.add_chunk(log_tk, sign)
            acc_suff.add_chunk(log_tk, sign * tau_c)
            acc_dis.add_chunk(log_tk, sign * gamma_c)
    if max_log == -np.inf:
        max_term = ScaledValue(0.0)
    else:
        max_term = ScaledValue(1.0, max_log)
    return WalkResult(
        positive=prep.positive,
        disease_ids=prep.disease_ids,
        likelihood=acc_lik.values()[0],
        max_term=max_term,
        posterior_numerators=tuple(acc_post.values()),
        sufficiency_numerators=tuple(acc_suff.values()),
        disablement_numerators=tuple(acc_dis.values()),
        engine="log",
    )


# ---------------------------------------------------------------------------
# Dispatch and public operations
# ---------------------------------------------------------------------------


def _choose_engine(prep: _WalkPrep, settings: InferenceSettings) -> str:
    if settings.kernel == "python":
        return "python"
    if settings.kernel == "numba":
        if not _kernels.HAVE_NUMBA:
            raise RuntimeError("kernel='numba' requested but numba is not importable")
        return "numba"
    work = len(prep.weights) * (1 << prep.m) * max(prep.n_d, 1)
    if _kernels.HAVE_NUMBA and work >= _AUTO_KERNEL_WORK:
        return "numba"
    return "python"


def walk_evidence(
    net: NoisyOrNetwork,
    evidence: Evidence,
    *,
    settings: InferenceSettings | None = None,
    unit_corrections: bool = False,
) -> WalkResult:
    """Run the subset walk once; returns likelihood plus all per-disease sums.

    ``unit_corrections`` replaces both correction multipliers with the
    constant 1.0, which must make the sufficiency and disablement numerators
    bit-identical to the posterior numerator; it exists as a live diagnostic
    of the correction plumbing.
    """
    settings = settings or DEFAULT_SETTINGS
    prep = _prepare_walk(net, evidence, settings)
    engine = _choose_engine(prep, settings)
    try:
        return _walk_linear(prep, settings, unit_corrections, engine)
    except _UnderflowSignal:
        return _walk_log(prep, settings, unit_corrections)


def evidence_likelihood(
    net: NoisyOrNetwork,
    evidence: Evidence,
    *,
    settings: InferenceSettings | None = None,
) -> float:
    """P(symptom evidence | observed risks); empty symptom evidence gives 1.0."""
    res = walk_evidence(net, evidence, settings=settings)
    value = res.likelihood.to_float()
    if value < -_LIK_SLACK or value > 1.0 + _LIK_SLACK:
        raise NumericsError(f"likelihood {value!r} outside [0, 1] beyond {_LIK_SLACK}")
    return min(1.0, max(0.0, value))


def disease_posterior(
    net: NoisyOrNetwork,
    evidence: Evidence,
    disease: str,
    *,
    settings: InferenceSettings | None = None,
) -> float:
    """P(disease = 1 | evidence)."""
    res = walk_evidence(net, evidence, settings=settings)
    k = res.index_of(disease)
    if res.zero_likelihood():
        raise ZeroLikelihoodError(
            "evidence has zero probability under this network; posterior undefined"
        )
    value = res.posterior_numerators[k].ratio_to(res.likelihood)
    return bounded_value(value, 0.0, 1.0, f"posterior of {disease!r}")


def joint_off_marginal(
    net: NoisyOrNetwork,
    off_symptoms: Iterable[str],
    *,
    target_disease: str | None = None,
    risk_evidence: Mapping[str, int] | Iterable[tuple[str, int]] | None = None,
    settings: InferenceSettings | None = None,
) -> float:
    """P(all of ``off_symptoms`` are 0 [, target disease = 1] | observed risks).

    The off-set may be empty, in which case the result is 1.0 (or the
    marginal activation probability of ``target_disease``). This is the walk
    with an empty positive set: a single subset, no alternation.
    ``risk_evidence`` accepts a mapping or (id, state) pairs.
    """
    ev = Evidence(
        risks=tuple(dict(risk_evidence or {}).items()),
        negative=tuple(off_symptoms),
    )
    res = walk_evidence(net, ev, settings=settings)
    if target_disease is None:
        value = res.likelihood.to_float()
        label = "off-set probability"
    else:
        value = res.posterior_numerators[res.index_of(target_disease)].to_float()
        label = f"joint off-set probability with {target_disease!r}"
    if value < -_LIK_SLACK or value > 1.0 + _LIK_SLACK:
        raise NumericsError(f"{label} {value!r} outside [0, 1] beyond {_LIK_SLACK}")
    return min(1.0, max(0.0, value))
