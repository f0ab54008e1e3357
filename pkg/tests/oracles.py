"""Independent oracles used to check the library's computations.

Nothing here reuses the library's computation paths: belief values come
from direct focal-set enumeration over frozensets, and the
maximum-entropy oracle is a brute-force grid search over the probability
simplex, entirely separate from the greedy bitmask algorithm it checks.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from dsflow.belief import MassFunction
from dsflow.frames import JointFrame, TupleSet, ValueTuple


def brute_belief(m: MassFunction, subset: frozenset) -> float:
    """Bel(A) by direct summation over focal sets contained in A."""
    return sum(mass for ts, mass in m.items() if ts.tuples <= subset)


def _simplex_grid(n: int, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """All probability vectors with coordinates i/steps, plus their
    entropies in bits.  Cached per (n, steps)."""
    key = (n, steps)
    if key in _simplex_grid.cache:
        return _simplex_grid.cache[key]
    if n == 1:
        pts = np.array([[1.0]])
    else:
        # Compositions of `steps` into n nonnegative parts.
        combos = itertools.combinations(range(steps + n - 1), n - 1)
        rows = []
        for cut in combos:
            prev = -1
            parts = []
            for c in cut:
                parts.append(c - prev - 1)
                prev = c
            parts.append(steps + n - 2 - prev)
            rows.append(parts)
        pts = np.asarray(rows, dtype=np.float64) / steps
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(pts > 0.0, np.log2(np.where(pts > 0.0, pts, 1.0)), 0.0)
    entropies = -(pts * logs).sum(axis=1)
    _simplex_grid.cache[key] = (pts, entropies)
    return pts, entropies


_simplex_grid.cache = {}


def grid_max_entropy(m: MassFunction, steps: int = 1000) -> float:
    """Maximum entropy over all grid distributions dominating Bel.

    Searches every probability vector with coordinates on a 1/steps
    lattice and keeps those satisfying Bel(A) <= p(A) for every subset A
    of the frame.
    """
    worlds: list[ValueTuple] = list(m.frame.tuples())
    n = len(worlds)
    pts, entropies = _simplex_grid(n, steps)

    feasible = np.ones(len(pts), dtype=bool)
    for r in range(1, n + 1):
        for combo in itertools.combinations(range(n), r):
            bel = brute_belief(m, frozenset(worlds[i] for i in combo))
            if bel == 0.0:
                continue
            sums = pts[:, combo].sum(axis=1)
            feasible &= sums >= bel - 1e-9
    if not feasible.any():
        raise AssertionError("no grid point dominates Bel; oracle grid too coarse")
    return float(entropies[feasible].max())


def singleton_sets(frame: JointFrame) -> list[TupleSet]:
    """One tuple set per world, in canonical order."""
    return [TupleSet(frame, frozenset({t})) for t in frame.tuples()]


def nonempty_subsets(frame: JointFrame) -> list[TupleSet]:
    """Every nonempty tuple set of the frame, in canonical order."""
    worlds = list(frame.tuples())
    out = []
    for r in range(1, len(worlds) + 1):
        for combo in itertools.combinations(worlds, r):
            out.append(TupleSet(frame, frozenset(combo)))
    return out


def shannon_bits(probs) -> float:
    """Plain entropy of a probability sequence, 0 log 0 = 0."""
    return -sum(p * math.log2(p) for p in probs if p > 0.0)
