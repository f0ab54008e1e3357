"""Frames of discernment over program variables.

A joint frame is the product space of per-variable value frames; its
elements (tuples) are total assignments of values to variables, and tuple
sets are the subsets that beliefs and program conditions talk about.

Values are either integers or symbolic atoms (opaque names).  Cross-kind
comparison is always unequal, never an error.  All types here are
immutable after construction and safe to share between threads.

Canonical serialization: variables are kept sorted by name, tuples render
as ``(a->0, g->A, p->A)``, tuple sets as ``{tuple, tuple}`` sorted
lexicographically.  Every piece of output in the package relies on this
ordering being deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import FrameError

# A value is a plain int or an atom spelled as a string.
Value = Union[int, str]

ValueTuple = tuple[Value, ...]


def value_key(v: Value):
    """Sort key giving the total order: integers first, then atoms."""
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise FrameError(f"value must be an integer or an atom string, got {v!r}")
    if isinstance(v, int):
        return (0, v, "")
    return (1, 0, v)


def value_text(v: Value) -> str:
    return str(v)


def _check_variable_name(name: str) -> None:
    if not isinstance(name, str) or not name or not name[0].islower():
        raise FrameError(
            f"variable name must be a nonempty string starting with a "
            f"lowercase letter, got {name!r}"
        )


@dataclass(frozen=True)
class JointFrame:
    """Product space over a set of variables.

    ``vars`` is held sorted by name; ``values[i]`` is the declared value
    tuple of ``vars[i]``.  Use :func:`build_joint_frame` rather than the
    raw constructor.
    """

    vars: tuple[str, ...]
    values: tuple[ValueTuple, ...]

    def var_index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise FrameError(f"variable {name!r} not in frame {self.vars}") from None

    def frame_of(self, name: str) -> ValueTuple:
        """Declared value frame of one variable."""
        return self.values[self.var_index(name)]

    @property
    def cardinality(self) -> int:
        n = 1
        for vs in self.values:
            n *= len(vs)
        return n

    def tuples(self) -> Iterator[ValueTuple]:
        """All tuples of the frame, in canonical order."""
        ordered = [sorted(vs, key=value_key) for vs in self.values]
        return itertools.product(*ordered)

    def tuple_of(self, assignment: Mapping[str, Value]) -> ValueTuple:
        """Validate and align a var->value mapping into a frame tuple."""
        extra = set(assignment) - set(self.vars)
        if extra:
            raise FrameError(f"assignment mentions unknown variables {sorted(extra)}")
        out = []
        for name, frame_values in zip(self.vars, self.values):
            if name not in assignment:
                raise FrameError(f"assignment missing variable {name!r}")
            v = assignment[name]
            if not any(v == fv and type(v) is type(fv) for fv in frame_values):
                raise FrameError(
                    f"value {v!r} not in the frame of {name!r} ({list(frame_values)})"
                )
            out.append(v)
        return tuple(out)

    def assignment_of(self, t: ValueTuple) -> dict[str, Value]:
        return dict(zip(self.vars, t))

    def subframe(self, names: Iterable[str]) -> "JointFrame":
        """Frame restricted to a subset of this frame's variables."""
        wanted = set(names)
        missing = wanted - set(self.vars)
        if missing:
            raise FrameError(f"not a variable subset: {sorted(missing)} unknown")
        keep = [i for i, n in enumerate(self.vars) if n in wanted]
        return JointFrame(
            tuple(self.vars[i] for i in keep), tuple(self.values[i] for i in keep)
        )

    def union(self, other: "JointFrame") -> "JointFrame":
        """Merged frame; shared variables must agree on their value frames."""
        merged: dict[str, ValueTuple] = dict(zip(self.vars, self.values))
        for name, vs in zip(other.vars, other.values):
            if name in merged and merged[name] != vs:
                raise FrameError(
                    f"incompatible frames for shared variable {name!r}: "
                    f"{list(merged[name])} vs {list(vs)}"
                )
            merged[name] = vs
        names = tuple(sorted(merged))
        return JointFrame(names, tuple(merged[n] for n in names))

    def tuple_text(self, t: ValueTuple) -> str:
        inner = ", ".join(f"{n}->{value_text(v)}" for n, v in zip(self.vars, t))
        return f"({inner})"


def build_joint_frame(decls: Sequence[tuple[str, Sequence[Value]]]) -> JointFrame:
    """Build a joint frame from (variable, value list) declarations.

    Variable names must be unique; each value list must be nonempty and
    duplicate-free.  The resulting frame's cardinality is the product of
    the list lengths.
    """
    if not decls:
        raise FrameError("at least one variable declaration is required")
    seen: dict[str, ValueTuple] = {}
    for name, vals in decls:
        _check_variable_name(name)
        if name in seen:
            raise FrameError(f"duplicate variable {name!r}")
        vals = tuple(vals)
        if not vals:
            raise FrameError(f"empty value list for variable {name!r}")
        keys = [value_key(v) for v in vals]
        if len(set(keys)) != len(keys):
            raise FrameError(f"duplicate value in the frame of {name!r}")
        seen[name] = vals
    names = tuple(sorted(seen))
    return JointFrame(names, tuple(seen[n] for n in names))


@dataclass(frozen=True)
class TupleSet:
    """A finite set of tuples over one joint frame."""

    frame: JointFrame
    tuples: frozenset[ValueTuple]

    @classmethod
    def from_assignments(
        cls, frame: JointFrame, assignments: Iterable[Mapping[str, Value]]
    ) -> "TupleSet":
        return cls(frame, frozenset(frame.tuple_of(a) for a in assignments))

    @classmethod
    def single(cls, frame: JointFrame, assignment: Mapping[str, Value]) -> "TupleSet":
        return cls(frame, frozenset({frame.tuple_of(assignment)}))

    @classmethod
    def full(cls, frame: JointFrame) -> "TupleSet":
        """The whole frame as a tuple set."""
        return cls(frame, frozenset(frame.tuples()))

    @classmethod
    def empty(cls, frame: JointFrame) -> "TupleSet":
        return cls(frame, frozenset())

    def __len__(self) -> int:
        return len(self.tuples)

    def __bool__(self) -> bool:
        return bool(self.tuples)

    def is_subset(self, other: "TupleSet") -> bool:
        self._require_same_frame(other)
        return self.tuples <= other.tuples

    def intersect(self, other: "TupleSet") -> "TupleSet":
        self._require_same_frame(other)
        return TupleSet(self.frame, self.tuples & other.tuples)

    def complement(self) -> "TupleSet":
        return TupleSet(self.frame, frozenset(self.frame.tuples()) - self.tuples)

    def _require_same_frame(self, other: "TupleSet") -> None:
        if self.frame != other.frame:
            raise FrameError("tuple sets live on different frames")

    def sorted_tuples(self) -> list[ValueTuple]:
        return sorted(self.tuples, key=lambda t: tuple(value_key(v) for v in t))

    def sort_key(self):
        return tuple(
            tuple(value_key(v) for v in t) for t in self.sorted_tuples()
        )

    def to_text(self) -> str:
        inner = ", ".join(self.frame.tuple_text(t) for t in self.sorted_tuples())
        return "{" + inner + "}"

    def assignments(self) -> list[dict[str, Value]]:
        """Member tuples as var->value dicts, in canonical order."""
        return [self.frame.assignment_of(t) for t in self.sorted_tuples()]


def project_tuple(frame: JointFrame, t: ValueTuple, names: Iterable[str]) -> ValueTuple:
    """Restrict one tuple to a variable subset (result aligned to the subframe)."""
    sub = frame.subframe(names)
    idx = [frame.var_index(n) for n in sub.vars]
    return tuple(t[i] for i in idx)


def project_tuple_set(s: TupleSet, names: Iterable[str]) -> TupleSet:
    """Project a tuple set onto a variable subset; duplicates collapse."""
    sub = s.frame.subframe(names)
    idx = [s.frame.var_index(n) for n in sub.vars]
    projected = frozenset(tuple(t[i] for i in idx) for t in s.tuples)
    return TupleSet(sub, projected)


def natural_join(a: TupleSet, b: TupleSet) -> TupleSet:
    """All tuples on the union frame whose restrictions lie in both sets.

    Disjoint variable sets give the Cartesian product; equal frames give
    plain intersection.
    """
    union = a.frame.union(b.frame)
    a_idx = [union.var_index(n) for n in a.frame.vars]
    b_idx = [union.var_index(n) for n in b.frame.vars]
    b_tuples = b.tuples
    shared = set(a.frame.vars) & set(b.frame.vars)

    if a.frame == b.frame:
        return TupleSet(a.frame, a.tuples & b.tuples)

    # Group b's tuples by their shared-variable part for a hash join.
    b_shared_idx = [b.frame.var_index(n) for n in sorted(shared)]
    groups: dict[ValueTuple, list[ValueTuple]] = {}
    for t in b_tuples:
        groups.setdefault(tuple(t[i] for i in b_shared_idx), []).append(t)

    a_shared_idx = [a.frame.var_index(n) for n in sorted(shared)]
    out = set()
    for ta in a.tuples:
        for tb in groups.get(tuple(ta[i] for i in a_shared_idx), ()):
            merged: list[Value] = [None] * len(union.vars)  # type: ignore[list-item]
            for i, j in enumerate(a_idx):
                merged[j] = ta[i]
            for i, j in enumerate(b_idx):
                merged[j] = tb[i]
            out.add(tuple(merged))
    return TupleSet(union, frozenset(out))


def extend_tuple_set(a: TupleSet, frame: JointFrame) -> TupleSet:
    """Extend a tuple set to a superset frame by joining with the full frame
    on the missing variables."""
    missing = set(frame.vars) - set(a.frame.vars)
    if set(a.frame.vars) - set(frame.vars):
        raise FrameError("target frame does not contain all source variables")
    if not missing:
        if a.frame != frame:
            raise FrameError("same variables but different value frames")
        return a
    rest = TupleSet.full(frame.subframe(missing))
    joined = natural_join(a, rest)
    if joined.frame != frame:
        raise FrameError("extension produced an incompatible frame")
    return joined
