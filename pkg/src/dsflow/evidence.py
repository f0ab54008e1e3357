"""Dempster's rule of combination and belief conditioning.

Combination pools two bodies of evidence through set intersection (same
frame) or natural join (different frames), rescaling by the conflict
constant k.  Conditioning revises a mass on new evidence "the true world
is in B"; it comes in the normalized form (with k) and in the raw form
used by lifted execution, which keeps the weight pushed onto the empty
set explicit instead of discarding it, because branch summation and final
normalization need that weight.

All functions here are pure; iteration is over focal-set pairs only,
never over power sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Union

from .belief import MassFunction, SubnormalMass, _checked
from .errors import FrameError, MassError, TotalConflictError
from .frames import JointFrame, TupleSet, Value, natural_join

CONFLICT_EPS = 1e-12


@dataclass(frozen=True)
class ConflictWeight:
    """Normalization constant of Dempster's rule.

    ``k`` scales the surviving mass; ``conflict_mass`` = 1 - 1/k is the
    total weight of conflicting focal pairs.
    """

    k: float
    conflict_mass: float

    @classmethod
    def from_k_inverse(cls, k_inv: float) -> "ConflictWeight":
        return cls(k=1.0 / k_inv, conflict_mass=1.0 - k_inv)


def _combine(
    m1: MassFunction,
    m2: MassFunction,
    frame: JointFrame,
    joiner: Callable[[TupleSet, TupleSet], TupleSet],
) -> tuple[MassFunction, ConflictWeight]:
    out: dict[TupleSet, float] = {}
    k_inv = 0.0
    for b, mb in m1.items():
        for c, mc in m2.items():
            joined = joiner(b, c)
            if len(joined) == 0:
                continue
            product = mb * mc
            k_inv += product
            out[joined] = out.get(joined, 0.0) + product
    if k_inv <= CONFLICT_EPS:
        raise TotalConflictError(
            "every focal-set pair is incompatible; combination undefined"
        )
    result = _checked(frame, {ts: mass / k_inv for ts, mass in out.items()})
    return result, ConflictWeight.from_k_inverse(k_inv)


def combine_same_frame(
    m1: MassFunction, m2: MassFunction
) -> tuple[MassFunction, ConflictWeight]:
    """Dempster's rule for two masses on one frame (intersection form)."""
    if m1.frame != m2.frame:
        raise FrameError("combine_same_frame needs identical frames")
    return _combine(m1, m2, m1.frame, lambda b, c: b.intersect(c))


def combine_join(
    m1: MassFunction, m2: MassFunction
) -> tuple[MassFunction, ConflictWeight]:
    """Dempster's rule across frames: intersection replaced by natural join.

    On identical frames this coincides exactly with
    :func:`combine_same_frame`.
    """
    frame = m1.frame.union(m2.frame)
    return _combine(m1, m2, frame, natural_join)


def condition_on_set(
    m: MassFunction, b: TupleSet
) -> tuple[MassFunction, ConflictWeight]:
    """Dempster's conditioning on evidence "the true world is in b"."""
    if b.frame != m.frame:
        raise FrameError("conditioning set lives outside the mass frame")
    out: dict[TupleSet, float] = {}
    k_inv = 0.0
    for c, mass in m.items():
        cut = c.intersect(b)
        if len(cut) == 0:
            continue
        k_inv += mass
        out[cut] = out.get(cut, 0.0) + mass
    if k_inv <= CONFLICT_EPS:
        raise TotalConflictError("no focal set intersects the conditioning set")
    result = _checked(m.frame, {ts: mass / k_inv for ts, mass in out.items()})
    return result, ConflictWeight.from_k_inverse(k_inv)


def condition_unnormalized(
    m: Union[MassFunction, SubnormalMass], b: TupleSet
) -> SubnormalMass:
    """Raw conditioning: each focal set's full mass moves to its
    intersection with b, with empty intersections kept as explicit
    empty-set weight rather than dropped."""
    if b.frame != m.frame:
        raise FrameError("conditioning set lives outside the mass frame")
    out: dict[TupleSet, float] = {}
    for c, mass in m.items():
        cut = c.intersect(b)
        out[cut] = out.get(cut, 0.0) + mass
    return SubnormalMass(m.frame, out)


def mass_update(
    sm: SubnormalMass,
    var: str,
    value_of: Callable[[Mapping[str, Value]], Value],
) -> SubnormalMass:
    """Rewrite every tuple of every focal set with ``var`` set to the value
    computed from that tuple.

    Focal sets that coincide after rewriting have their masses summed;
    the empty set maps to itself.  Produced values must lie in the
    variable's frame.
    """
    frame = sm.frame
    idx = frame.var_index(var)
    allowed = frame.frame_of(var)
    out: dict[TupleSet, float] = {}
    for ts, mass in sm.items():
        rewritten = set()
        for t in ts.tuples:
            v = value_of(frame.assignment_of(t))
            if not any(v == fv and type(v) is type(fv) for fv in allowed):
                raise MassError(
                    f"assignment drives {var!r} to {v!r}, outside its frame "
                    f"{list(allowed)}"
                )
            rewritten.add(t[:idx] + (v,) + t[idx + 1 :])
        new_ts = TupleSet(frame, frozenset(rewritten))
        out[new_ts] = out.get(new_ts, 0.0) + mass
    return SubnormalMass(frame, out)
