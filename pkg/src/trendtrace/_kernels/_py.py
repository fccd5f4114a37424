"""Pure-Python kernels.

Reference implementation for the compiled module ``_cy``; both must produce
bit-identical results for identical inputs. Random draws use SplitMix64
(Steele, Lea & Flood, "Fast splittable pseudorandom number generators",
OOPSLA 2014) with a 64-bit state passed explicitly in and out.
"""

from __future__ import annotations

import math
from bisect import bisect_right

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
POISSON_CHUNK = 32.0
_TWO_POW_M53 = 1.0 / (1 << 53)


def splitmix64(state: int) -> tuple[int, int]:
    """Advance the state once; return ``(new_state, output)``."""
    state = (state + GOLDEN_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def _uniform_int(state: int, lo: int, hi: int) -> tuple[int, int]:
    span = hi - lo + 1
    limit = (1 << 64) - ((1 << 64) % span)
    while True:
        state, x = splitmix64(state)
        if x < limit:
            return lo + x % span, state


def uniform_int(state: int, lo: int, hi: int) -> tuple[int, int]:
    """Unbiased integer in ``[lo, hi]`` by rejection; returns ``(value, state)``."""
    if hi < lo:
        raise ValueError("empty range")
    return _uniform_int(state, lo, hi)


def poisson(state: int, mean: float) -> tuple[int, int]:
    """Poisson draw as a sum of Knuth multiplication draws over chunks of mean <= 32."""
    if mean <= 0:
        return 0, state
    chunks = max(1, int(math.ceil(mean / POISSON_CHUNK)))
    limit = math.exp(-(mean / chunks))
    total = 0
    for _ in range(chunks):
        state, x = splitmix64(state)
        p = (x >> 11) * _TWO_POW_M53
        while p > limit:
            total += 1
            state, x = splitmix64(state)
            p *= (x >> 11) * _TWO_POW_M53
    return total, state


def place_events(state: int, n: int, cum_weights: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Draw ``n`` (second-of-day, popularity rank) pairs."""
    cum = cum_weights.tolist()
    last = len(cum) - 1
    total = cum[last]
    seconds = [0] * n
    ranks = [0] * n
    for i in range(n):
        seconds[i], state = _uniform_int(state, 0, 86399)
        state, x = splitmix64(state)
        r = bisect_right(cum, (x >> 11) * _TWO_POW_M53 * total)
        ranks[i] = r if r <= last else last
    return np.array(seconds, dtype=np.int64), np.array(ranks, dtype=np.int64), state


def accumulate_keywords(
    record_idx: np.ndarray,
    event_weights: np.ndarray,
    indptr: np.ndarray,
    indices: np.ndarray,
    n_keywords: int,
) -> np.ndarray:
    """Sum event weights onto every keyword of each event's record.

    ``record_idx`` is -1 for events without a record. Keywords of record ``r``
    are ``indices[indptr[r]:indptr[r + 1]]``.
    """
    out = [0.0] * n_keywords
    ptr = indptr.tolist()
    idx = indices.tolist()
    for r, w in zip(record_idx.tolist(), event_weights.tolist()):
        if r < 0:
            continue
        for j in range(ptr[r], ptr[r + 1]):
            out[idx[j]] += w
    return np.array(out, dtype=np.float64)


def bincount(idx: np.ndarray, n: int) -> np.ndarray:
    """Count occurrences of each value in ``[0, n)``; other values are ignored."""
    out = [0] * n
    for i in idx.tolist():
        if 0 <= i < n:
            out[i] += 1
    return np.array(out, dtype=np.int64)
