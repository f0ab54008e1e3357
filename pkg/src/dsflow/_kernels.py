"""Bitmask kernels behind the aggregate-uncertainty functional.

The maximum-entropy greedy algorithm works on a belief table indexed by
world bitmask, so its inner loops are pure array arithmetic over 2^n
entries.  Two interchangeable lanes are provided:

* a numba ``@njit`` lane (default when numba imports cleanly), and
* a vectorized pure-numpy lane.

Set the environment variable ``DSFLOW_NO_NUMBA`` to a non-empty value
other than ``0`` to force the numpy lane.  Both lanes run the same
operations in the same order and return bit-identical results;
``benchmarks/bench_kernels.py`` compares their speed.

Frames here are small by contract (the caller caps cardinality, default
16), so tables top out at 65536 entries.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "DSFLOW_NO_NUMBA"

# Residual belief below this is treated as exhausted (float noise from
# the repeated table subtractions, masses themselves are pruned at 1e-12).
_RESIDUAL_EPS = 1e-14


def _numba_disabled_by_env() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip() not in ("", "0")


try:
    if _numba_disabled_by_env():
        raise ImportError("numba disabled by " + _ENV_FLAG)
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    njit = None
    HAVE_NUMBA = False

ACTIVE_LANE = "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy lane


def bel_table_numpy(masks: np.ndarray, weights: np.ndarray, n: int) -> np.ndarray:
    """Belief of every subset of an n-world frame, indexed by bitmask.

    ``masks[i]`` is the bitmask of the i-th focal set and ``weights[i]``
    its mass; Bel(A) sums the weights of focal sets contained in A.
    """
    size = 1 << n
    idx = np.arange(size, dtype=np.int64)
    bel = np.zeros(size, dtype=np.float64)
    for i in range(masks.shape[0]):
        f = int(masks[i])
        bel[(idx & f) == f] += weights[i]
    return bel


def max_entropy_numpy(bel: np.ndarray, n: int) -> float:
    """Greedy maximum-entropy extraction from a belief table.

    Repeatedly pick the nonempty subset A of the remaining worlds with
    maximal Bel(A)/|A| (ties to the largest set, then the smallest
    bitmask), give each of its worlds that ratio as probability, rewrite
    the table to the residual belief and shrink the frame.  Leftover
    worlds with zero residual belief get probability zero.  Returns the
    entropy of the assembled distribution in bits.
    """
    bel = bel.astype(np.float64, copy=True)
    size = 1 << n
    idx = np.arange(size, dtype=np.int64)
    card = np.zeros(size, dtype=np.int64)
    for b in range(n):
        card += (idx >> b) & 1

    rem = size - 1
    entropy = 0.0
    while rem != 0 and bel[rem] > _RESIDUAL_EPS:
        sub = idx[(idx & ~rem) == 0][1:]  # nonempty submasks of rem, ascending
        scores = bel[sub] / card[sub]
        best = scores.max()
        tied = sub[scores == best]
        tied_card = card[tied]
        tied = tied[tied_card == tied_card.max()]
        a = int(tied.min())
        bel_a = float(bel[a])
        # log(bel/|A|) as a difference keeps the two exact anchors exact:
        # a point gives 0, total ignorance gives log2 n.
        entropy -= bel_a * (np.log2(bel_a) - np.log2(float(card[a])))
        rem &= ~a
        low = idx[(idx & ~rem) == 0]
        bel[low] = bel[low | a] - bel_a
    return float(entropy)


# ---------------------------------------------------------------------------
# numba lane (same steps, loop form)

if HAVE_NUMBA:

    @njit(cache=True)
    def _bel_table_nb(masks, weights, n):  # pragma: no cover - numba
        size = 1 << n
        bel = np.zeros(size, dtype=np.float64)
        for i in range(masks.shape[0]):
            f = masks[i]
            w = weights[i]
            for a in range(size):
                if a & f == f:
                    bel[a] += w
        return bel

    @njit(cache=True)
    def _max_entropy_nb(bel_in, n):  # pragma: no cover - numba
        bel = bel_in.copy()
        size = 1 << n
        rem = size - 1
        entropy = 0.0
        while rem != 0 and bel[rem] > _RESIDUAL_EPS:
            best_score = -1.0
            best_card = -1
            best_mask = -1
            for a in range(1, size):
                if a & ~rem != 0:
                    continue
                c = 0
                aa = a
                while aa:
                    c += aa & 1
                    aa >>= 1
                score = bel[a] / c
                if score > best_score or (score == best_score and c > best_card):
                    best_score = score
                    best_card = c
                    best_mask = a
            a = best_mask
            bel_a = bel[a]
            entropy -= bel_a * (np.log2(bel_a) - np.log2(float(best_card)))
            rem &= ~a
            b = rem
            while True:
                bel[b] = bel[b | a] - bel_a
                if b == 0:
                    break
                b = (b - 1) & rem
        return entropy


# ---------------------------------------------------------------------------
# dispatch


def bel_table(masks: np.ndarray, weights: np.ndarray, n: int) -> np.ndarray:
    if HAVE_NUMBA:
        return _bel_table_nb(masks, weights, np.int64(n))
    return bel_table_numpy(masks, weights, n)


def max_entropy_from_bel(bel: np.ndarray, n: int) -> float:
    if HAVE_NUMBA:
        return float(_max_entropy_nb(bel, np.int64(n)))
    return max_entropy_numpy(bel, n)


def warmup() -> None:
    """Trigger JIT compilation ahead of timing-sensitive work."""
    masks = np.array([1, 3], dtype=np.int64)
    weights = np.array([0.5, 0.5], dtype=np.float64)
    max_entropy_from_bel(bel_table(masks, weights, 2), 2)
