"""Information measures on distributions and mass functions.

Classical measures (Shannon entropy, Kullback-Leibler, Jensen-Shannon)
act on probability distributions.  Their evidence-theoretic counterparts
act on mass functions:

* nonspecificity ``gen_hartley``: focal-set size weighted by mass,
* ``aggregate_uncertainty``: the maximum Shannon entropy over all
  distributions dominating the belief function, computed by the greedy
  bitmask kernel,
* conflict ``gen_shannon``: aggregate minus nonspecificity,
* ``gen_js``: the Jensen-Shannon construction with ``gen_shannon`` in
  place of Shannon entropy.

All logarithms are binary, all results are in bits, and the convention
0 log 0 = 0 applies throughout.  The aggregate-uncertainty step
enumerates subsets of the frame, so frames are capped (default 16
worlds, override per call).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from . import _kernels
from .belief import MassFunction, mix
from .errors import FrameError, MassError
from .frames import JointFrame, ValueTuple

DEFAULT_MAX_WORLDS = 16

_GS_CLAMP = 1e-9


@dataclass(frozen=True)
class Distribution:
    """A probability distribution over the worlds of a joint frame.

    ``probs`` aligns with the frame's canonical world order
    (``frame.tuples()``).
    """

    frame: JointFrame
    probs: tuple[float, ...]

    @classmethod
    def from_probs(
        cls,
        frame: JointFrame,
        probs: Union[Sequence[float], Mapping[ValueTuple, float]],
    ) -> "Distribution":
        worlds = list(frame.tuples())
        if isinstance(probs, Mapping):
            vec = [float(probs.get(w, 0.0)) for w in worlds]
        else:
            vec = [float(p) for p in probs]
            if len(vec) != len(worlds):
                raise MassError(
                    f"{len(vec)} probabilities for {len(worlds)} worlds"
                )
        if any(p < 0.0 or p > 1.0 for p in vec):
            raise MassError("probabilities must lie in [0, 1]")
        if abs(sum(vec) - 1.0) > 1e-9:
            raise MassError(f"probabilities sum to {sum(vec)!r}, expected 1")
        return cls(frame, tuple(vec))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=np.float64)


def bayesian_distribution(m: MassFunction) -> Distribution:
    """The distribution induced by a Bayesian mass (all-singleton focal sets)."""
    if not m.is_bayesian():
        raise MassError("mass has non-singleton focal sets; no induced distribution")
    table = {next(iter(ts.tuples)): mass for ts, mass in m.items()}
    return Distribution.from_probs(m.frame, table)


def _entropy_bits(vec: np.ndarray) -> float:
    nz = vec[vec > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def shannon_entropy(p: Distribution) -> float:
    """-sum p log2 p over the frame's worlds."""
    return _entropy_bits(p.as_array())


def kl_divergence(p1: Distribution, p2: Distribution) -> float:
    """Kullback-Leibler divergence in bits; +inf where p1 > 0 meets p2 = 0."""
    if p1.frame != p2.frame:
        raise FrameError("distributions live on different frames")
    a = p1.as_array()
    b = p2.as_array()
    support = a > 0.0
    if np.any(support & (b == 0.0)):
        return math.inf
    a = a[support]
    b = b[support]
    return float((a * np.log2(a / b)).sum())


def js_divergence(p1: Distribution, p2: Distribution) -> float:
    """Jensen-Shannon divergence in bits: finite, symmetric, within [0, 2]."""
    if p1.frame != p2.frame:
        raise FrameError("distributions live on different frames")
    a = p1.as_array()
    b = p2.as_array()
    value = 2.0 * _entropy_bits((a + b) / 2.0) - _entropy_bits(a) - _entropy_bits(b)
    return 0.0 if -_GS_CLAMP <= value < 0.0 else value


def gen_hartley(m: MassFunction) -> float:
    """Nonspecificity: sum of m(A) log2 |A| over focal sets."""
    return float(sum(mass * math.log2(len(ts)) for ts, mass in m.items()))


def _focal_bitmasks(m: MassFunction) -> tuple[np.ndarray, np.ndarray, int]:
    worlds = {t: i for i, t in enumerate(m.frame.tuples())}
    masks = []
    weights = []
    for ts, mass in m.items():
        mask = 0
        for t in ts.tuples:
            mask |= 1 << worlds[t]
        masks.append(mask)
        weights.append(mass)
    return (
        np.asarray(masks, dtype=np.int64),
        np.asarray(weights, dtype=np.float64),
        len(worlds),
    )


def aggregate_uncertainty(
    m: MassFunction, max_worlds: int = DEFAULT_MAX_WORLDS
) -> float:
    """Maximum Shannon entropy over all distributions dominating Bel.

    Runs the greedy extraction on a belief table over the frame's
    subsets; cost grows exponentially with the frame, hence the cap.
    """
    n = m.frame.cardinality
    if n > max_worlds:
        raise FrameError(
            f"frame has {n} worlds, above the aggregate-uncertainty cap "
            f"{max_worlds}"
        )
    masks, weights, n = _focal_bitmasks(m)
    bel = _kernels.bel_table(masks, weights, n)
    return _kernels.max_entropy_from_bel(bel, n)


def gen_shannon(m: MassFunction, max_worlds: int = DEFAULT_MAX_WORLDS) -> float:
    """Conflict: aggregate uncertainty minus nonspecificity.

    Values in [-1e-9, 0) are float noise and clamp to zero.
    """
    value = aggregate_uncertainty(m, max_worlds) - gen_hartley(m)
    return 0.0 if -_GS_CLAMP <= value < 0.0 else value


def gen_js(
    m1: MassFunction, m2: MassFunction, max_worlds: int = DEFAULT_MAX_WORLDS
) -> float:
    """Jensen-Shannon divergence between mass functions via gen_shannon."""
    if m1.frame != m2.frame:
        raise FrameError("masses live on different frames")
    value = (
        2.0 * gen_shannon(mix(m1, m2), max_worlds)
        - gen_shannon(m1, max_worlds)
        - gen_shannon(m2, max_worlds)
    )
    return 0.0 if -_GS_CLAMP <= value < 0.0 else value
