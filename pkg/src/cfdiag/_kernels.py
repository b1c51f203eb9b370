"""JIT-compiled Gray-code walk kernel.

This mirrors the pure-Python reference walk in `inference.py` operation for
operation: same enumeration order (blocks of consecutive subset indices,
completions inner, subsets innermost), same compensated accumulation, same
refresh cadence. The Python walk is authoritative; this one exists because the
walk is O(2^m * diseases) and a 2^20-subset evaluation has to finish in
seconds. Keep the two in sync if either changes.

If numba is unavailable the undecorated function still runs (slowly) and
``HAVE_NUMBA`` tells the dispatcher not to pick it for large workloads.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


_TINY = 1e-300  # running products below this trigger the log-space fallback


@njit(cache=True, nogil=True)
def _rebuild(mask, lam, leak, one_minus, gamma_inc, w_base, leak_base, unit, W, tau, gamma):
    """Recompute all running state directly from the subset bitmask."""
    n_d, m = lam.shape
    L = leak_base
    for j in range(n_d):
        W[j] = w_base[j]
        if unit:
            tau[j] = 1.0
            gamma[j] = 1.0
        else:
            s = 0.0
            for b in range(m):
                s += one_minus[j, b]
            tau[j] = s
            gamma[j] = 0.0
    b = 0
    mm = mask
    while mm:
        if mm & 1:
            L *= leak[b]
            for j in range(n_d):
                W[j] *= lam[j, b]
                if not unit:
                    tau[j] -= one_minus[j, b]
                    gamma[j] += gamma_inc[j, b]
        mm >>= 1
        b += 1
    return L


@njit(cache=True, nogil=True)
def gray_block(
    start,
    stop,
    lam,
    leak,
    one_minus,
    gamma_inc,
    w_base,
    leak_base,
    p_mat,
    weights,
    unit,
    divide_free,
    refresh_every,
    out_scalar,
    out_post,
    out_suff,
    out_dis,
):
    """Walk subsets [start, stop) for every completion; accumulate signed sums.

    Writes [likelihood, max_term] into ``out_scalar`` and the per-disease
    posterior / sufficiency / disablement numerators into the vector outputs.
    Returns 0 on success, 1 if any running product underflowed (caller then
    reruns the query in log space).
    """
    n_d, m = lam.shape
    n_c = p_mat.shape[0]
    W = np.empty(n_d)
    tau = np.empty(n_d)
    gamma = np.empty(n_d)
    A = np.empty(n_d)

    lik_s = 0.0
    lik_c = 0.0
    post_s = np.zeros(n_d)
    post_c = np.zeros(n_d)
    suff_s = np.zeros(n_d)
    suff_c = np.zeros(n_d)
    dis_s = np.zeros(n_d)
    dis_c = np.zeros(n_d)
    max_term = 0.0

    for c in range(n_c):
        w_cc = weights[c]
        if w_cc == 0.0:
            continue
        p = p_mat[c]
        mask = start ^ (start >> 1)
        L = _rebuild(mask, lam, leak, one_minus, gamma_inc, w_base, leak_base, unit, W, tau, gamma)
        pc = 0
        mm = mask
        while mm:
            pc += mm & 1
            mm >>= 1
        sign = -1.0 if (pc & 1) else 1.0
        steps = 0
        i = start
        while True:
            prodA = 1.0
            for j in range(n_d):
                wj = W[j]
                if wj < _TINY:
                    return 1
                a = (1.0 - p[j]) + p[j] * wj
                A[j] = a
                prodA *= a
            if L < _TINY or prodA < _TINY:
                return 1
            t = L * prodA * w_cc
            if t > max_term:
                max_term = t
            st = sign * t
            y = st - lik_c
            tt = lik_s + y
            lik_c = (tt - lik_s) - y
            lik_s = tt
            for j in range(n_d):
                tk = st * (p[j] * W[j] / A[j])
                y = tk - post_c[j]
                tt = post_s[j] + y
                post_c[j] = (tt - post_s[j]) - y
                post_s[j] = tt
                v = tk * tau[j]
                y = v - suff_c[j]
                tt = suff_s[j] + y
                suff_c[j] = (tt - suff_s[j]) - y
                suff_s[j] = tt
                v = tk * gamma[j]
                y = v - dis_c[j]
                tt = dis_s[j] + y
                dis_c[j] = (tt - dis_s[j]) - y
                dis_s[j] = tt
            i += 1
            if i >= stop:
                break
            b = 0
            while not ((i >> b) & 1):
                b += 1
            bit = 1 << b
            mask ^= bit
            sign = -sign
            if mask & bit:
                L *= leak[b]
                for j in range(n_d):
                    W[j] *= lam[j, b]
                    if not unit:
                        tau[j] -= one_minus[j, b]
                        gamma[j] += gamma_inc[j, b]
            elif divide_free:
                L = _rebuild(
                    mask, lam, leak, one_minus, gamma_inc, w_base, leak_base, unit, W, tau, gamma
                )
            else:
                L /= leak[b]
                for j in range(n_d):
                    W[j] /= lam[j, b]
                    if not unit:
                        tau[j] += one_minus[j, b]
                        gamma[j] -= gamma_inc[j, b]
                steps += 1
                if steps >= refresh_every:
                    L = _rebuild(
                        mask, lam, leak, one_minus, gamma_inc, w_base, leak_base, unit, W, tau, gamma
                    )
                    steps = 0

    out_scalar[0] = lik_s
    out_scalar[1] = max_term
    for j in range(n_d):
        out_post[j] = post_s[j]
        out_suff[j] = suff_s[j]
        out_dis[j] = dis_s[j]
    return 0
