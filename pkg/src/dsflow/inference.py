"""The attacker's inference scheme.

One interaction with a program: the system fixes the secret (high) part
of the input and the attacker fixes the public (low) part, both as point
masses.  The true run produces an output mass from which one state is
sampled and its low projection observed.  The attacker separately
predicts the output by running the program on her prebelief joined with
her chosen low input, conditions the prediction on the observation, and
projects to the secret variables to obtain her postbelief.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .belief import MassFunction, SubnormalMass, normalize, point_mass, project_mass
from .errors import FrameError, MassError
from .evidence import ConflictWeight, combine_join, combine_same_frame, condition_on_set
from .frames import JointFrame, TupleSet, Value, extend_tuple_set
from .lang import Command, ExecLimits, command_variables, exec_lifted

State = dict[str, Value]


@dataclass(frozen=True)
class AttackerSetup:
    """Frames, beliefs, and program for a sequence of interactions.

    ``high_vars`` and ``low_vars`` partition the program's variables;
    ``m_init`` and every evidence mass live on the high frame.
    """

    frame: JointFrame
    high_vars: tuple[str, ...]
    low_vars: tuple[str, ...]
    m_init: MassFunction
    evidence: tuple[MassFunction, ...]
    program: Command

    def __post_init__(self):
        high = set(self.high_vars)
        low = set(self.low_vars)
        if not high:
            raise FrameError("at least one high (secret) variable is required")
        if high & low:
            raise FrameError(f"variables both high and low: {sorted(high & low)}")
        if high | low != set(self.frame.vars):
            raise FrameError("high and low variables must cover the frame")
        high_frame = self.frame.subframe(high)
        if self.m_init.frame != high_frame:
            raise MassError("initial belief does not live on the high frame")
        for m in self.evidence:
            if m.frame != high_frame:
                raise MassError("evidence mass does not live on the high frame")
        unknown = command_variables(self.program) - set(self.frame.vars)
        if unknown:
            raise FrameError(f"program uses undeclared variables {sorted(unknown)}")

    @property
    def high_frame(self) -> JointFrame:
        return self.frame.subframe(self.high_vars)

    @property
    def low_frame(self) -> JointFrame:
        return self.frame.subframe(self.low_vars)


@dataclass(frozen=True)
class Interaction:
    """One run: the system's secret, the attacker's low choice, and
    whether the attacker carries her previous postbelief forward."""

    secret: Mapping[str, Value]
    low_choice: Mapping[str, Value]
    carry_postbelief: bool = False


@dataclass
class InteractionTrace:
    """Every intermediate of one interaction, in protocol order."""

    m_pre: MassFunction
    truth_point: MassFunction  # point on the secret, high frame
    low_point: MassFunction  # point on the low choice, low frame
    input_combination: MassFunction  # truth ⊗ low on the full frame
    k_input: ConflictWeight
    m_delta: MassFunction  # true output mass
    sampled_state: State
    observation: State  # low projection of the sampled state
    prediction_combination: MassFunction  # low ⊗ prebelief on the full frame
    k_prediction: ConflictWeight
    prediction: MassFunction  # attacker's predicted output mass
    observation_set: TupleSet  # observation expanded to the full frame
    k_observe: ConflictWeight
    conditioned: MassFunction  # prediction conditioned on the observation
    m_post: MassFunction  # postbelief on the high frame


def compute_prebelief(setup: AttackerSetup) -> MassFunction:
    """Combine the initial belief with all gathered evidence, left to right."""
    m = setup.m_init
    for piece in setup.evidence:
        m, _ = combine_same_frame(m, piece)
    return m


def sample_output(m_delta: MassFunction, rng: random.Random) -> State:
    """Draw one state from an output mass: a focal set uniformly, then a
    tuple uniformly inside it.  Deterministic for a given rng state."""
    focals = m_delta.focal_sets
    chosen = focals[rng.randrange(len(focals))]
    tuples = chosen.sorted_tuples()
    t = tuples[rng.randrange(len(tuples))]
    return m_delta.frame.assignment_of(t)


def run_interaction(
    setup: AttackerSetup,
    m_pre: MassFunction,
    interaction: Interaction,
    rng: random.Random,
    limits: ExecLimits = ExecLimits(),
) -> InteractionTrace:
    """Execute the full protocol once and record every intermediate."""
    high_frame = setup.high_frame
    low_frame = setup.low_frame
    if m_pre.frame != high_frame:
        raise MassError("prebelief does not live on the high frame")

    truth_point = point_mass(TupleSet.single(high_frame, interaction.secret))
    low_point = point_mass(TupleSet.single(low_frame, interaction.low_choice))

    # The system's run on the real secret.
    input_combination, k_input = combine_join(truth_point, low_point)
    m_delta = normalize(
        exec_lifted(setup.program, SubnormalMass.from_mass(input_combination), limits)
    )

    sampled = sample_output(m_delta, rng)
    observation = {v: sampled[v] for v in low_frame.vars}

    # The attacker's prediction from her prebelief.
    prediction_combination, k_prediction = combine_join(low_point, m_pre)
    prediction = normalize(
        exec_lifted(
            setup.program, SubnormalMass.from_mass(prediction_combination), limits
        )
    )

    # Condition the prediction on the observed low projection.
    observation_set = extend_tuple_set(
        TupleSet.single(low_frame, observation), setup.frame
    )
    conditioned, k_observe = condition_on_set(prediction, observation_set)
    m_post = project_mass(conditioned, setup.high_vars)

    return InteractionTrace(
        m_pre=m_pre,
        truth_point=truth_point,
        low_point=low_point,
        input_combination=input_combination,
        k_input=k_input,
        m_delta=m_delta,
        sampled_state=sampled,
        observation=observation,
        prediction_combination=prediction_combination,
        k_prediction=k_prediction,
        prediction=prediction,
        observation_set=observation_set,
        k_observe=k_observe,
        conditioned=conditioned,
        m_post=m_post,
    )


def run_interactions(
    setup: AttackerSetup,
    interactions: Sequence[Interaction],
    rng: random.Random,
    limits: ExecLimits = ExecLimits(),
) -> list[InteractionTrace]:
    """Run a sequence of interactions, carrying postbeliefs forward where
    an interaction asks for it; otherwise each starts from the combined
    prebelief."""
    traces: list[InteractionTrace] = []
    previous: Optional[MassFunction] = None
    for interaction in interactions:
        if interaction.carry_postbelief:
            if previous is None:
                raise MassError(
                    "the first interaction has no previous postbelief to carry"
                )
            m_pre = previous
        else:
            m_pre = compute_prebelief(setup)
        trace = run_interaction(setup, m_pre, interaction, rng, limits)
        traces.append(trace)
        previous = trace.m_post
    return traces
