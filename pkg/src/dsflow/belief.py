"""Mass functions over joint frames.

A mass function assigns weight to nonempty tuple sets (its focal sets),
summing to one.  Lifted program execution additionally needs *subnormal*
masses, which may carry weight on the empty set and need not sum to one;
they are a separate type so they cannot leak into uncertainty
computations unnormalized.

Masses are 64-bit floats validated to 1e-9; focal sets whose weight falls
below 1e-12 during arithmetic are pruned as float noise.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .errors import FrameError, MassError, TotalConflictError
from .frames import JointFrame, TupleSet, project_tuple_set

MASS_TOLERANCE = 1e-9
PRUNE_EPS = 1e-12


def _sorted_entries(entries: Mapping[TupleSet, float]) -> list[tuple[TupleSet, float]]:
    return sorted(entries.items(), key=lambda kv: kv[0].sort_key())


def _entries_text(entries: Mapping[TupleSet, float]) -> str:
    parts = [f"{ts.to_text()}: {mass:.6f}" for ts, mass in _sorted_entries(entries)]
    return "[" + "; ".join(parts) + "]"


class MassFunction:
    """A normalized mass function; build through :func:`make_mass`."""

    __slots__ = ("frame", "_entries")

    def __init__(self, frame: JointFrame, entries: Mapping[TupleSet, float]):
        self.frame = frame
        self._entries = dict(_sorted_entries(entries))

    @classmethod
    def vacuous(cls, frame: JointFrame) -> "MassFunction":
        """Total ignorance: all mass on the whole frame."""
        return cls(frame, {TupleSet.full(frame): 1.0})

    @property
    def focal_sets(self) -> tuple[TupleSet, ...]:
        return tuple(self._entries)

    def items(self) -> list[tuple[TupleSet, float]]:
        return list(self._entries.items())

    def mass_of(self, ts: TupleSet) -> float:
        return self._entries.get(ts, 0.0)

    def is_bayesian(self) -> bool:
        return all(len(ts) == 1 for ts in self._entries)

    def total(self) -> float:
        return sum(self._entries.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, MassFunction):
            return NotImplemented
        return self.frame == other.frame and self._entries == other._entries

    def approx_equals(self, other: "MassFunction", tol: float = MASS_TOLERANCE) -> bool:
        if self.frame != other.frame:
            return False
        keys = set(self._entries) | set(other._entries)
        return all(abs(self.mass_of(k) - other.mass_of(k)) <= tol for k in keys)

    def to_text(self) -> str:
        return _entries_text(self._entries)

    def __repr__(self) -> str:
        return f"MassFunction({self.to_text()})"


class SubnormalMass:
    """Intermediate mass produced by lifted execution.

    May hold weight on the empty tuple set, and its total may be anything
    positive; :func:`normalize` turns it back into a proper mass function.
    """

    __slots__ = ("frame", "_entries")

    def __init__(self, frame: JointFrame, entries: Mapping[TupleSet, float]):
        self.frame = frame
        self._entries = dict(_sorted_entries(entries))

    @classmethod
    def from_mass(cls, m: MassFunction) -> "SubnormalMass":
        return cls(m.frame, dict(m.items()))

    @classmethod
    def zero(cls, frame: JointFrame) -> "SubnormalMass":
        return cls(frame, {})

    def items(self) -> list[tuple[TupleSet, float]]:
        return list(self._entries.items())

    def mass_of(self, ts: TupleSet) -> float:
        return self._entries.get(ts, 0.0)

    def total(self) -> float:
        return sum(self._entries.values())

    def empty_set_mass(self) -> float:
        return self._entries.get(TupleSet.empty(self.frame), 0.0)

    def nonempty_total(self) -> float:
        return sum(mass for ts, mass in self._entries.items() if len(ts) > 0)

    def to_text(self) -> str:
        return _entries_text(self._entries)

    def __repr__(self) -> str:
        return f"SubnormalMass({self.to_text()})"


def _checked(frame: JointFrame, entries: dict[TupleSet, float]) -> MassFunction:
    """Internal constructor for arithmetic results: prune noise, check sum."""
    pruned = {ts: m for ts, m in entries.items() if m > PRUNE_EPS}
    total = sum(pruned.values())
    if abs(total - 1.0) > MASS_TOLERANCE:
        raise MassError(f"mass total {total!r} is not 1 within {MASS_TOLERANCE}")
    return MassFunction(frame, pruned)


def make_mass(frame: JointFrame, entries: Mapping[TupleSet, float]) -> MassFunction:
    """Validate and build a normalized mass function.

    Every key must be a nonempty tuple set on ``frame`` with positive
    mass, and the masses must sum to one within 1e-9.
    """
    if not entries:
        raise MassError("a mass function needs at least one focal set")
    for ts, mass in entries.items():
        if ts.frame != frame:
            raise MassError(f"focal set {ts.to_text()} lives outside the frame")
        if len(ts) == 0:
            raise MassError("the empty set cannot carry mass")
        if not (mass > 0.0):
            raise MassError(f"mass {mass!r} for {ts.to_text()} is not positive")
    total = sum(entries.values())
    if abs(total - 1.0) > MASS_TOLERANCE:
        raise MassError(f"masses sum to {total!r}, expected 1 within {MASS_TOLERANCE}")
    return MassFunction(frame, dict(entries))


def point_mass(a: TupleSet) -> MassFunction:
    """The mass fully concentrated on one nonempty tuple set."""
    if len(a) == 0:
        raise MassError("cannot concentrate mass on the empty set")
    return MassFunction(a.frame, {a: 1.0})


def project_mass(m: MassFunction, names: Iterable[str]) -> MassFunction:
    """Project a mass function onto a variable subset.

    Focal sets whose projections coincide have their masses added; the
    total is preserved.
    """
    names = list(names)
    out: dict[TupleSet, float] = {}
    for ts, mass in m.items():
        p = project_tuple_set(ts, names)
        out[p] = out.get(p, 0.0) + mass
    sub = m.frame.subframe(names)
    return _checked(sub, out)


def belief_of(m: MassFunction, a: TupleSet) -> float:
    """Bel(A): total mass of focal sets contained in A."""
    if a.frame != m.frame:
        raise FrameError("tuple set lives outside the mass function's frame")
    return sum(mass for ts, mass in m.items() if ts.tuples <= a.tuples)


def normalize(sm: SubnormalMass) -> MassFunction:
    """Drop any empty-set weight and rescale the rest to total one."""
    empty = TupleSet.empty(sm.frame)
    rest = {ts: mass for ts, mass in sm.items() if ts != empty and mass > PRUNE_EPS}
    total = sum(rest.values())
    if total <= PRUNE_EPS:
        raise TotalConflictError(
            "no mass outside the empty set; nothing to normalize"
        )
    return _checked(sm.frame, {ts: mass / total for ts, mass in rest.items()})


def mix(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Pointwise average of two mass functions on the same frame."""
    if m1.frame != m2.frame:
        raise FrameError("cannot mix masses on different frames")
    keys = sorted(set(m1.focal_sets) | set(m2.focal_sets), key=lambda k: k.sort_key())
    return _checked(
        m1.frame, {k: (m1.mass_of(k) + m2.mass_of(k)) / 2.0 for k in keys}
    )


def weighted_sum(parts: Iterable[tuple[float, SubnormalMass]]) -> SubnormalMass:
    """Scale each part by its weight and add entrywise (empty set included)."""
    parts = list(parts)
    if not parts:
        raise MassError("weighted_sum needs at least one part")
    frame = parts[0][1].frame
    out: dict[TupleSet, float] = {}
    for weight, sm in parts:
        if sm.frame != frame:
            raise FrameError("weighted_sum parts live on different frames")
        if weight < 0.0:
            raise MassError(f"negative weight {weight!r}")
        if weight == 0.0:
            continue
        for ts, mass in sm.items():
            out[ts] = out.get(ts, 0.0) + weight * mass
    return SubnormalMass(frame, {ts: m for ts, m in out.items() if m > PRUNE_EPS})
