"""Hot numeric kernels with numba-jitted and pure-numpy implementations.

The jitted path is used when numba imports cleanly; set
``REVIEWGAP_DISABLE_NUMBA=1`` to force the numpy/python fallback (the
benchmark in ``benchmarks/bench_kernels.py`` times both). Both paths run the
same arithmetic in the same order, so results are bit-identical.
"""

from __future__ import annotations

import math
import os

import numpy as np

_FLAG = os.environ.get("REVIEWGAP_DISABLE_NUMBA", "").strip().lower()
NUMBA_REQUESTED = _FLAG not in ("1", "true", "yes")

HAS_NUMBA = False
if NUMBA_REQUESTED:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:
        pass


# ---------------------------------------------------------------------------
# per-text category bitmasks
#
# codepoints: one flat uint32 array holding every scalar of every text,
# offsets[i]:offsets[i+1] delimiting text i. lookup maps codepoint -> small
# category id. The result packs the set of categories seen in text i into a
# uint32 bitmask. This is the single hottest loop when classifying a corpus.
# ---------------------------------------------------------------------------

def _present_masks_loop(codepoints, offsets, lookup):
    n = offsets.shape[0] - 1
    out = np.zeros(n, dtype=np.uint32)
    for i in range(n):
        m = np.uint32(0)
        for j in range(offsets[i], offsets[i + 1]):
            m |= np.uint32(1) << lookup[codepoints[j]]
        out[i] = m
    return out


def present_masks_numpy(codepoints, offsets, lookup):
    """Vectorized fallback: bitwise-or reduction over segment slices."""
    n = offsets.shape[0] - 1
    out = np.zeros(n, dtype=np.uint32)
    if codepoints.size == 0 or n == 0:
        return out
    bits = np.uint32(1) << lookup[codepoints].astype(np.uint32)
    lengths = np.diff(offsets)
    nonempty = lengths > 0
    starts = np.minimum(offsets[:-1], bits.size - 1)
    reduced = np.bitwise_or.reduceat(bits, starts)
    out[nonempty] = reduced[nonempty]
    return out


if HAS_NUMBA:
    present_masks_numba = njit(cache=True)(_present_masks_loop)
    present_masks = present_masks_numba
else:
    present_masks_numba = None
    present_masks = present_masks_numpy


# ---------------------------------------------------------------------------
# regularized incomplete beta -> Student-t tail probability
#
# Continued fraction evaluated with the modified Lentz method, absolute
# tolerance 1e-10. Scalar kernel called per report row; jitting matters for
# the length sweep, which evaluates it per bin.
# ---------------------------------------------------------------------------

_FPMIN = 1e-300
_BETA_TOL = 1e-10
_BETA_MAXIT = 500


def _betacf_py(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_TOL:
            break
    return h


def _betainc_py(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf_py(a, b, x) / a
    return 1.0 - front * _betacf_py(b, a, 1.0 - x) / b


if HAS_NUMBA:
    _betacf_numba = njit(cache=True)(_betacf_py)

    @njit(cache=True)
    def betainc_numba(a, b, x):
        if x <= 0.0:
            return 0.0
        if x >= 1.0:
            return 1.0
        ln_front = (
            math.lgamma(a + b)
            - math.lgamma(a)
            - math.lgamma(b)
            + a * math.log(x)
            + b * math.log(1.0 - x)
        )
        front = math.exp(ln_front)
        if x < (a + 1.0) / (a + b + 2.0):
            return front * _betacf_numba(a, b, x) / a
        return 1.0 - front * _betacf_numba(b, a, 1.0 - x) / b

    betainc = betainc_numba
else:
    betainc_numba = None
    betainc = _betainc_py

betainc_numpy = _betainc_py


def student_t_two_sided_p(t: float, df: float) -> float:
    """Two-sided p-value of a t statistic under df degrees of freedom."""
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return betainc(0.5 * df, 0.5, x)
