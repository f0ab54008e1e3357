"""Scenario files, experiment orchestration, and report rendering.

A scenario file is JSON: variable declarations split into high and low,
the program (inline or a path relative to the scenario file), the
attacker's initial belief and gathered evidence on the high frame, the
interaction list, and runtime knobs (seed, loop bounds).  Running it
replays the inference scheme per interaction and measures flow; reports
render as a human table or as JSON (the stable, machine-checked form).

Exit codes: 0 success, 2 malformed scenario or program, 3 total conflict
or detected non-termination, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from .belief import MassFunction, make_mass
from .errors import (
    DsflowError,
    NonTerminationError,
    ProgramSyntaxError,
    ScenarioError,
    TotalConflictError,
)
from .frames import JointFrame, TupleSet, Value, build_joint_frame
from .inference import (
    AttackerSetup,
    Interaction,
    InteractionTrace,
    compute_prebelief,
    run_interaction,
)
from .lang import ExecLimits, parse_program
from .qif import FlowReport, flow_measure

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_CONFLICT = 3
EXIT_INTERNAL = 4


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    limits: ExecLimits = ExecLimits()


@dataclass
class InteractionResult:
    index: int
    trace: InteractionTrace
    flow: FlowReport


@dataclass
class ScenarioReport:
    interactions: list[InteractionResult]
    summary: list[float]


# ---------------------------------------------------------------------------
# Scenario loading


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ScenarioError(message)


def _check_value(v: Any, where: str) -> Value:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise ScenarioError(f"{where}: values must be integers or atom strings")
    return v


def _parse_assignment(
    obj: Any, frame: JointFrame, where: str
) -> dict[str, Value]:
    _require(isinstance(obj, dict), f"{where}: expected an object of var: value")
    out = {}
    for k, v in obj.items():
        out[k] = _check_value(v, where)
    try:
        frame.tuple_of(out)
    except DsflowError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc
    return out


def _parse_belief(
    entries: Any, frame: JointFrame, where: str
) -> MassFunction:
    _require(isinstance(entries, list) and entries, f"{where}: expected a nonempty list")
    table: dict[TupleSet, float] = {}
    for i, item in enumerate(entries):
        spot = f"{where}[{i}]"
        _require(isinstance(item, dict), f"{spot}: expected an object")
        _require("set" in item and "mass" in item, f"{spot}: needs 'set' and 'mass'")
        raw_set = item["set"]
        _require(isinstance(raw_set, list) and raw_set, f"{spot}.set: nonempty list required")
        ts = TupleSet.from_assignments(
            frame, [_parse_assignment(a, frame, f"{spot}.set") for a in raw_set]
        )
        mass = item["mass"]
        _require(
            isinstance(mass, (int, float)) and not isinstance(mass, bool),
            f"{spot}.mass: expected a number",
        )
        _require(ts not in table, f"{spot}: duplicate focal set")
        table[ts] = float(mass)
    try:
        return make_mass(frame, table)
    except DsflowError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def load_scenario(
    path: str | Path,
) -> tuple[AttackerSetup, list[Interaction], RunConfig]:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario {path} is not valid JSON: {exc}") from exc
    _require(isinstance(raw, dict), "scenario root must be an object")

    known_keys = {
        "variables", "program", "initial_belief", "evidence",
        "interactions", "seed", "max_loop_iterations", "tolerance",
    }
    unknown = set(raw) - known_keys
    _require(not unknown, f"unknown scenario keys: {sorted(unknown)}")

    # Variables and frames.
    decls = raw.get("variables")
    _require(isinstance(decls, list) and decls, "'variables' must be a nonempty list")
    high, low, pairs = [], [], []
    for i, d in enumerate(decls):
        where = f"variables[{i}]"
        _require(isinstance(d, dict), f"{where}: expected an object")
        _require(
            set(d) == {"name", "frame", "class"},
            f"{where}: needs exactly 'name', 'frame', 'class'",
        )
        name, values, cls = d["name"], d["frame"], d["class"]
        _require(isinstance(name, str), f"{where}.name: expected a string")
        _require(isinstance(values, list) and values, f"{where}.frame: nonempty list")
        values = [_check_value(v, f"{where}.frame") for v in values]
        _require(cls in ("high", "low"), f"{where}.class: must be 'high' or 'low'")
        (high if cls == "high" else low).append(name)
        pairs.append((name, values))
    try:
        frame = build_joint_frame(pairs)
    except DsflowError as exc:
        raise ScenarioError(f"variables: {exc}") from exc
    _require(bool(high), "at least one variable must be high")
    high_frame = frame.subframe(high)

    # Program.
    prog = raw.get("program")
    _require(isinstance(prog, dict), "'program' must be an object")
    _require(
        len(prog) == 1 and next(iter(prog)) in ("path", "inline"),
        "'program' needs exactly one of 'path' or 'inline'",
    )
    if "inline" in prog:
        _require(isinstance(prog["inline"], str), "program.inline: expected a string")
        text = prog["inline"]
    else:
        _require(isinstance(prog["path"], str), "program.path: expected a string")
        prog_path = path.parent / prog["path"]
        try:
            text = prog_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioError(f"cannot read program {prog_path}: {exc}") from exc
    program = parse_program(text)  # ProgramSyntaxError passes through

    # Beliefs.
    if "initial_belief" in raw:
        m_init = _parse_belief(raw["initial_belief"], high_frame, "initial_belief")
    else:
        m_init = MassFunction.vacuous(high_frame)
    evidence = []
    raw_evidence = raw.get("evidence", [])
    _require(isinstance(raw_evidence, list), "'evidence' must be a list of belief lists")
    for i, entry in enumerate(raw_evidence):
        evidence.append(_parse_belief(entry, high_frame, f"evidence[{i}]"))

    try:
        setup = AttackerSetup(
            frame=frame,
            high_vars=tuple(high_frame.vars),
            low_vars=tuple(frame.subframe(low).vars) if low else (),
            m_init=m_init,
            evidence=tuple(evidence),
            program=program,
        )
    except DsflowError as exc:
        raise ScenarioError(str(exc)) from exc

    # Interactions.
    raw_inter = raw.get("interactions")
    _require(
        isinstance(raw_inter, list) and raw_inter,
        "'interactions' must be a nonempty list",
    )
    interactions = []
    for i, item in enumerate(raw_inter):
        where = f"interactions[{i}]"
        _require(isinstance(item, dict), f"{where}: expected an object")
        extra = set(item) - {"secret", "low", "carry_postbelief"}
        _require(not extra, f"{where}: unknown keys {sorted(extra)}")
        _require("secret" in item and "low" in item, f"{where}: needs 'secret' and 'low'")
        secret = _parse_assignment(item["secret"], high_frame, f"{where}.secret")
        low_choice = _parse_assignment(
            item["low"], setup.low_frame, f"{where}.low"
        )
        carry = item.get("carry_postbelief", False)
        _require(isinstance(carry, bool), f"{where}.carry_postbelief: expected a bool")
        _require(
            not (carry and i == 0), f"{where}: the first interaction cannot carry"
        )
        interactions.append(Interaction(secret, low_choice, carry))

    seed = raw.get("seed", 0)
    _require(
        isinstance(seed, int) and not isinstance(seed, bool), "'seed' must be an integer"
    )
    max_iters = raw.get("max_loop_iterations", ExecLimits().max_loop_iterations)
    _require(
        isinstance(max_iters, int) and not isinstance(max_iters, bool) and max_iters > 0,
        "'max_loop_iterations' must be a positive integer",
    )
    tolerance = raw.get("tolerance", ExecLimits().loop_tolerance)
    _require(
        isinstance(tolerance, (int, float))
        and not isinstance(tolerance, bool)
        and tolerance > 0,
        "'tolerance' must be a positive number",
    )
    config = RunConfig(
        seed=seed,
        limits=ExecLimits(
            max_loop_iterations=max_iters, loop_tolerance=float(tolerance)
        ),
    )
    return setup, interactions, config


# ---------------------------------------------------------------------------
# Running


def run_scenario(
    setup: AttackerSetup,
    interactions: Sequence[Interaction],
    config: RunConfig = RunConfig(),
) -> ScenarioReport:
    """Run every interaction and measure the flow of each."""
    rng = random.Random(config.seed)
    results: list[InteractionResult] = []
    previous: Optional[MassFunction] = None
    for i, interaction in enumerate(interactions):
        if interaction.carry_postbelief:
            if previous is None:
                raise ScenarioError("the first interaction cannot carry a postbelief")
            m_pre = previous
        else:
            m_pre = compute_prebelief(setup)
        trace = run_interaction(setup, m_pre, interaction, rng, config.limits)
        flow = flow_measure(trace.m_pre, trace.m_post, trace.truth_point)
        results.append(InteractionResult(index=i + 1, trace=trace, flow=flow))
        previous = trace.m_post
    return ScenarioReport(
        interactions=results, summary=[r.flow.q for r in results]
    )


# ---------------------------------------------------------------------------
# Rendering


def _mass_json(m: MassFunction) -> list[dict[str, Any]]:
    return [
        {"set": ts.assignments(), "mass": mass} for ts, mass in m.items()
    ]


def _trace_json(trace: InteractionTrace) -> dict[str, Any]:
    return {
        "truth_point": _mass_json(trace.truth_point),
        "low_point": _mass_json(trace.low_point),
        "input_combination": _mass_json(trace.input_combination),
        "m_delta": _mass_json(trace.m_delta),
        "sampled_state": trace.sampled_state,
        "prediction_combination": _mass_json(trace.prediction_combination),
        "prediction": _mass_json(trace.prediction),
        "observation_set": trace.observation_set.assignments(),
        "conditioned": _mass_json(trace.conditioned),
    }


def report_to_json(report: ScenarioReport, include_trace: bool = False) -> dict[str, Any]:
    interactions = []
    for r in report.interactions:
        entry: dict[str, Any] = {
            "pre": _mass_json(r.trace.m_pre),
            "post": _mass_json(r.trace.m_post),
            "observation": r.trace.observation,
            "gjs_pre": r.flow.gjs_pre,
            "gjs_post": r.flow.gjs_post,
            "q": r.flow.q,
            "eta": r.flow.eta,
            "search_space": r.flow.search_space,
            "within_bounds": r.flow.within_bounds,
            "conflict": {
                "input_combination": r.trace.k_input.k,
                "prediction_combination": r.trace.k_prediction.k,
                "observation_conditioning": r.trace.k_observe.k,
            },
        }
        if include_trace:
            entry["trace"] = _trace_json(r.trace)
        interactions.append(entry)
    return {"interactions": interactions, "summary": report.summary}


def _mass_lines(m: MassFunction, indent: str) -> list[str]:
    return [
        f"{indent}{ts.to_text()}: {mass:.6f}" for ts, mass in m.items()
    ]


def _state_text(frame: JointFrame, state: Mapping[str, Value]) -> str:
    return frame.subframe(state.keys()).tuple_text(
        tuple(state[v] for v in sorted(state))
    )


def format_table(report: ScenarioReport, include_trace: bool = False) -> str:
    lines: list[str] = []
    for r in report.interactions:
        t = r.trace
        lines.append(f"interaction {r.index}")
        lines.append("  prebelief:")
        lines.extend(_mass_lines(t.m_pre, "    "))
        if include_trace:
            lines.append(f"  secret: {t.truth_point.to_text()}")
            lines.append(f"  low choice: {t.low_point.to_text()}")
            lines.append(
                f"  input combination: {t.input_combination.to_text()} "
                f"(k = {t.k_input.k:.6f})"
            )
            lines.append(f"  output mass: {t.m_delta.to_text()}")
            lines.append(
                f"  sampled state: {_state_text(t.m_delta.frame, t.sampled_state)}"
            )
        lines.append(f"  observation: {_state_text(t.prediction.frame, t.observation)}")
        if include_trace:
            lines.append(
                f"  prediction combination: {t.prediction_combination.to_text()} "
                f"(k = {t.k_prediction.k:.6f})"
            )
            lines.append(f"  prediction: {t.prediction.to_text()}")
            lines.append(f"  observation set: {t.observation_set.to_text()}")
            lines.append(f"  k = {t.k_observe.k:.6f}")
            lines.append(f"  conditioned prediction: {t.conditioned.to_text()}")
        lines.append("  postbelief:")
        lines.extend(_mass_lines(t.m_post, "    "))
        lines.append(f"  gjs_pre  = {r.flow.gjs_pre:.6f} bits")
        lines.append(f"  gjs_post = {r.flow.gjs_post:.6f} bits")
        lines.append(f"  q        = {r.flow.q:.6f} bits")
        lines.append(f"  eta      = {r.flow.eta:.6f} bits")
        lines.append(f"  within bounds: {'yes' if r.flow.within_bounds else 'NO'}")
        lines.append(f"  search space: 2^(eta - q) = {r.flow.search_space:.6f}")
        lines.append("")
    qs = ", ".join(f"{q:.6f}" for q in report.summary)
    lines.append(f"summary: q = [{qs}]")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsflow",
        description="Belief-based quantitative information flow analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    analyze = sub.add_parser("analyze", help="run scenario files and report flow")
    analyze.add_argument(
        "--scenario",
        action="append",
        required=True,
        metavar="PATH",
        help="scenario file; may be given multiple times",
    )
    analyze.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    analyze.add_argument(
        "--max-loop-iters",
        type=int,
        default=None,
        metavar="N",
        help="override the loop iteration cap",
    )
    analyze.add_argument(
        "--tolerance",
        type=float,
        default=None,
        metavar="X",
        help="override the loop residual tolerance",
    )
    analyze.add_argument(
        "--format", choices=("table", "json"), default="table", dest="fmt"
    )
    analyze.add_argument(
        "--trace",
        action="store_true",
        help="include every intermediate mass of each interaction",
    )
    return parser


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    limits = config.limits
    if args.max_loop_iters is not None:
        limits = ExecLimits(args.max_loop_iters, limits.loop_tolerance)
    if args.tolerance is not None:
        limits = ExecLimits(limits.max_loop_iterations, args.tolerance)
    seed = config.seed if args.seed is None else args.seed
    return RunConfig(seed=seed, limits=limits)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        outputs = []
        for scenario_path in args.scenario:
            setup, interactions, config = load_scenario(scenario_path)
            config = _apply_overrides(config, args)
            report = run_scenario(setup, interactions, config)
            if args.fmt == "json":
                outputs.append(report_to_json(report, include_trace=args.trace))
            else:
                header = f"scenario: {scenario_path}\nseed: {config.seed}\n"
                outputs.append(header + format_table(report, include_trace=args.trace))
    except (ScenarioError, ProgramSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (TotalConflictError, NonTerminationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFLICT
    except (DsflowError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    if args.fmt == "json":
        payload = outputs[0] if len(outputs) == 1 else outputs
        print(json.dumps(payload, indent=2))
    else:
        print("\n\n".join(outputs))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
