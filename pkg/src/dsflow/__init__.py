"""dsflow: quantitative information flow with Dempster-Shafer attacker beliefs.

The package models attacker beliefs as mass functions over joint frames
of program variables, runs programs of a small probabilistic
while-language both concretely and lifted to masses, replays the
attacker's inference scheme against a program, and measures the
resulting flow in bits with a generalized Jensen-Shannon divergence.
"""

from .belief import (
    MassFunction,
    SubnormalMass,
    belief_of,
    make_mass,
    mix,
    normalize,
    point_mass,
    project_mass,
    weighted_sum,
)
from .errors import (
    DsflowError,
    EvalError,
    FrameError,
    InternalError,
    MassError,
    NonTerminationError,
    ProgramSyntaxError,
    ScenarioError,
    TotalConflictError,
)
from .evidence import (
    ConflictWeight,
    combine_join,
    combine_same_frame,
    condition_on_set,
    condition_unnormalized,
    mass_update,
)
from .frames import (
    JointFrame,
    TupleSet,
    Value,
    build_joint_frame,
    extend_tuple_set,
    natural_join,
    project_tuple_set,
)
from .inference import (
    AttackerSetup,
    Interaction,
    InteractionTrace,
    compute_prebelief,
    run_interaction,
    run_interactions,
    sample_output,
)
from .lang import (
    ExecLimits,
    eval_aexp,
    eval_bexp,
    exec_concrete,
    exec_lifted,
    expand_bexp,
    initial_state,
    parse_program,
    pretty_program,
)
from .qif import FlowReport, flow_measure, flow_range
from .uncertainty import (
    Distribution,
    aggregate_uncertainty,
    bayesian_distribution,
    gen_hartley,
    gen_js,
    gen_shannon,
    js_divergence,
    kl_divergence,
    shannon_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "AttackerSetup",
    "ConflictWeight",
    "Distribution",
    "DsflowError",
    "EvalError",
    "ExecLimits",
    "FlowReport",
    "FrameError",
    "Interaction",
    "InteractionTrace",
    "InternalError",
    "JointFrame",
    "MassError",
    "MassFunction",
    "NonTerminationError",
    "ProgramSyntaxError",
    "ScenarioError",
    "SubnormalMass",
    "TotalConflictError",
    "TupleSet",
    "Value",
    "aggregate_uncertainty",
    "bayesian_distribution",
    "belief_of",
    "build_joint_frame",
    "combine_join",
    "combine_same_frame",
    "compute_prebelief",
    "condition_on_set",
    "condition_unnormalized",
    "eval_aexp",
    "eval_bexp",
    "exec_concrete",
    "exec_lifted",
    "expand_bexp",
    "extend_tuple_set",
    "flow_measure",
    "flow_range",
    "gen_hartley",
    "gen_js",
    "gen_shannon",
    "initial_state",
    "js_divergence",
    "kl_divergence",
    "make_mass",
    "mass_update",
    "mix",
    "natural_join",
    "normalize",
    "parse_program",
    "point_mass",
    "pretty_program",
    "project_mass",
    "project_tuple_set",
    "run_interaction",
    "run_interactions",
    "sample_output",
    "shannon_entropy",
    "weighted_sum",
]
