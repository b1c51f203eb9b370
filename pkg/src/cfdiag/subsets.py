"""Gray-code subset enumeration with incrementally maintained products.

The exact-inference kernel sums an alternating series over all subsets Z of the
positively evidenced symptoms. Visiting subsets in binary-reflected Gray-code
order means consecutive subsets differ by exactly one symptom, so every
per-disease product over the current subset can be maintained with a single
multiply (or divide) per step instead of being rebuilt from scratch.

`SubsetTermCache` holds that running state for one walk: per-disease products of
edge failure probabilities over the current off-set, the leak product, the two
correction-term partial sums, and the alternating sign. Repeated division is a
slow drift source, so the cache refreshes itself from scratch on a fixed cadence
(and exposes `recompute` so tests can compare the incremental state against a
direct evaluation at any step). A divide-free mode replaces every division with
a from-scratch rebuild of the affected column's products; it is slower but
drift-free by construction.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "gray_code",
    "flipped_bit",
    "iter_bits",
    "KahanScalar",
    "KahanVector",
    "SubsetTermCache",
]


def gray_code(i: int) -> int:
    """The i-th binary-reflected Gray code word."""
    return i ^ (i >> 1)


def flipped_bit(i: int) -> int:
    """Bit position that differs between gray_code(i-1) and gray_code(i).

    Equals the number of trailing zeros of i; valid for i >= 1.
    """
    return (i & -i).bit_length() - 1


def iter_bits(mask: int):
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class KahanScalar:
    """Compensated (Kahan) summation for one float."""

    __slots__ = ("total", "_c")

    def __init__(self) -> None:
        self.total = 0.0
        self._c = 0.0

    def add(self, x: float) -> None:
        y = x - self._c
        t = self.total + y
        self._c = (t - self.total) - y
        self.total = t


class KahanVector:
    """Compensated summation for a fixed-length float vector."""

    __slots__ = ("total", "_c")

    def __init__(self, n: int) -> None:
        self.total = np.zeros(n)
        self._c = np.zeros(n)

    def add(self, x: np.ndarray) -> None:
        y = x - self._c
        t = self.total + y
        self._c = (t - self.total) - y
        self.total = t


class SubsetTermCache:
    """Running per-disease products and correction sums for a Gray-code walk.

    Parameters
    ----------
    lam:
        (n_diseases, n_bits) edge failure probabilities from each disease to
        each walk symptom; 1.0 where no edge exists.
    leak:
        (n_bits,) leak failure probabilities of the walk symptoms.
    w_base:
        (n_diseases,) product of edge failure probabilities over the fixed
        (always-off) symptom set; folded into the running products.
    leak_base:
        scalar product of leak failure probabilities over the fixed off-set.
    divide_free:
        when True, leaving a subset rebuilds the affected products from the
        current mask instead of dividing, so no division ever happens.
    refresh_every:
        in the default (dividing) mode, rebuild all state from scratch every
        this many steps to bound multiplicative drift.

    State exposed: ``mask`` (current subset), ``sign`` (+1/-1 alternating with
    subset parity), ``products`` (per-disease running product over the off-set,
    w_base included), ``leak_product``, ``tau`` (per-disease sum of (1 - lam)
    over walk symptoms *outside* the subset), ``gamma`` (per-disease sum of
    (1 - 1/lam) over walk symptoms *inside* the subset).
    """

    def __init__(
        self,
        lam: np.ndarray,
        leak: np.ndarray,
        w_base: np.ndarray,
        leak_base: float,
        *,
        divide_free: bool = False,
        refresh_every: int = 1024,
    ) -> None:
        self.lam = np.asarray(lam, dtype=float)
        self.leak = np.asarray(leak, dtype=float)
        self.w_base = np.asarray(w_base, dtype=float)
        self.leak_base = float(leak_base)
        self.n_diseases, self.n_bits = self.lam.shape
        self.one_minus = 1.0 - self.lam
        # Correction increment for a symptom entering the subset; exactly zero
        # for non-edges (lam == 1) so untouched diseases never accumulate noise.
        self.gamma_inc = 1.0 - 1.0 / self.lam
        self.divide_free = bool(divide_free)
        self.refresh_every = int(refresh_every)
        self._steps_since_refresh = 0
        self.seek(0)

    # -- positioning --------------------------------------------------------

    def seek(self, index: int) -> None:
        """Jump to subset number ``index`` (Gray order), rebuilding all state."""
        self.mask = gray_code(index)
        self.sign = -1.0 if bin(self.mask).count("1") % 2 else 1.0
        self._rebuild()
        self._steps_since_refresh = 0

    def _rebuild(self) -> None:
        bits = list(iter_bits(self.mask))
        w = self.w_base.copy()
        lk = self.leak_base
        tau = self.one_minus.sum(axis=1)
        gamma = np.zeros(self.n_diseases)
        for b in bits:
            w *= self.lam[:, b]
            lk *= self.leak[b]
            tau -= self.one_minus[:, b]
            gamma += self.gamma_inc[:, b]
        self.products = w
        self.leak_product = lk
        self.tau = tau
        self.gamma = gamma

    def advance(self, index: int) -> int:
        """Step from subset ``index - 1`` to ``index``; returns the flipped bit."""
        b = flipped_bit(index)
        bit = 1 << b
        self.mask ^= bit
        self.sign = -self.sign
        entering = bool(self.mask & bit)
        if entering:
            self.products *= self.lam[:, b]
            self.leak_product *= self.leak[b]
            self.tau -= self.one_minus[:, b]
            self.gamma += self.gamma_inc[:, b]
        elif self.divide_free:
            self._rebuild()
        else:
            self.products /= self.lam[:, b]
            self.leak_product /= self.leak[b]
            self.tau += self.one_minus[:, b]
            self.gamma -= self.gamma_inc[:, b]
            self._steps_since_refresh += 1
            if self._steps_since_refresh >= self.refresh_every:
                self._rebuild()
                self._steps_since_refresh = 0
        return b

    # -- verification -------------------------------------------------------

    def recompute(self) -> tuple[np.ndarray, float, np.ndarray, np.ndarray]:
        """Direct (non-incremental) evaluation of the state at the current mask.

        Returns (products, leak_product, tau, gamma) without touching the
        incremental state; used by invariant tests and nothing else.
        """
        saved = (self.products, self.leak_product, self.tau, self.gamma)
        self._rebuild()
        fresh = (self.products, self.leak_product, self.tau, self.gamma)
        self.products, self.leak_product, self.tau, self.gamma = saved
        return fresh
