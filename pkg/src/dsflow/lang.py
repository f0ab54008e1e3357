"""The probabilistic while-language: syntax, states, and both semantics.

Programs are built from skip, assignment, sequencing, conditionals,
while loops, and binary probabilistic choice.  Concrete execution maps a
state to a state, resolving probabilistic choice by sampling.  Lifted
execution maps a (subnormal) mass function to a subnormal mass function:
conditionals condition the mass on the guard and its negation, execute
both branches, and add the results; loops iterate the guard/body split
until the looping part carries no more mass.  Callers normalize the
result at program end.

Concrete syntax::

    command   := atom (';' command)?                 # ';' right-associative
    atom      := 'skip'
               | name ':=' aexp
               | 'if' bexp 'then' command 'else' command 'end'
               | 'while' bexp 'do' command 'end'
               | '{' command '}' '[' number ']' '{' command '}'
    bexp      := 'true' | 'false' | 'not' bexp | bexp 'and'/'or' bexp
               | aexp ('=' | '!=' | '<' | '<=') aexp | '(' bexp ')'
    aexp      := integers, atoms, variables, '+', '-', '*', parentheses

Identifiers starting lowercase are variables, starting uppercase are
atoms; ``#`` comments run to end of line.  The number in a probabilistic
choice must lie in [0, 1].  Files conventionally use the ``.whl``
extension.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Union

from .belief import SubnormalMass, weighted_sum
from .errors import EvalError, NonTerminationError, ProgramSyntaxError
from .evidence import condition_unnormalized, mass_update
from .frames import JointFrame, TupleSet, Value

State = dict[str, Value]


# ---------------------------------------------------------------------------
# Abstract syntax


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class AtomLit:
    name: str


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*'
    left: "Aexp"
    right: "Aexp"


Aexp = Union[IntLit, AtomLit, VarRef, BinOp]


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str  # '=', '!=', '<', '<='
    left: Aexp
    right: Aexp


@dataclass(frozen=True)
class Not:
    operand: "Bexp"


@dataclass(frozen=True)
class And:
    left: "Bexp"
    right: "Bexp"


@dataclass(frozen=True)
class Or:
    left: "Bexp"
    right: "Bexp"


Bexp = Union[BoolLit, Cmp, Not, And, Or]


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Aexp


@dataclass(frozen=True)
class Seq:
    first: "Command"
    second: "Command"


@dataclass(frozen=True)
class If:
    cond: Bexp
    then_cmd: "Command"
    else_cmd: "Command"


@dataclass(frozen=True)
class While:
    cond: Bexp
    body: "Command"


@dataclass(frozen=True)
class PChoice:
    prob: float
    left: "Command"
    right: "Command"


Command = Union[Skip, Assign, Seq, If, While, PChoice]


def command_variables(c: Command) -> set[str]:
    """All variable names a command reads or writes."""

    def of_aexp(a: Aexp) -> set[str]:
        if isinstance(a, VarRef):
            return {a.name}
        if isinstance(a, BinOp):
            return of_aexp(a.left) | of_aexp(a.right)
        return set()

    def of_bexp(b: Bexp) -> set[str]:
        if isinstance(b, Cmp):
            return of_aexp(b.left) | of_aexp(b.right)
        if isinstance(b, Not):
            return of_bexp(b.operand)
        if isinstance(b, (And, Or)):
            return of_bexp(b.left) | of_bexp(b.right)
        return set()

    if isinstance(c, Skip):
        return set()
    if isinstance(c, Assign):
        return {c.var} | of_aexp(c.expr)
    if isinstance(c, Seq):
        return command_variables(c.first) | command_variables(c.second)
    if isinstance(c, If):
        return (
            of_bexp(c.cond)
            | command_variables(c.then_cmd)
            | command_variables(c.else_cmd)
        )
    if isinstance(c, While):
        return of_bexp(c.cond) | command_variables(c.body)
    if isinstance(c, PChoice):
        return command_variables(c.left) | command_variables(c.right)
    raise TypeError(f"not a command: {c!r}")


# ---------------------------------------------------------------------------
# Tokenizer / parser

_KEYWORDS = {
    "skip", "if", "then", "else", "end", "while", "do",
    "true", "false", "not", "and", "or",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>:=|!=|<=|[;+\-*()=<{}\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'int', 'float', 'var', 'atom', keyword, symbol, 'eof'
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ProgramSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        col = pos - line_start + 1
        pos = m.end()
        if m.lastgroup in ("ws", "comment"):
            continue
        if m.lastgroup == "newline":
            line += 1
            line_start = pos
            continue
        value = m.group()
        if m.lastgroup == "number":
            kind = "int" if re.fullmatch(r"\d+", value) else "float"
        elif m.lastgroup == "ident":
            if value in _KEYWORDS:
                kind = value
            elif value[0].islower():
                kind = "var"
            elif value[0].isupper():
                kind = "atom"
            else:
                raise ProgramSyntaxError(
                    f"identifier {value!r} must start with a letter", line, col
                )
        else:
            kind = value
        tokens.append(_Token(kind, value, line, col))
    tokens.append(_Token("eof", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def accept(self, kind: str) -> Optional[_Token]:
        if self.peek().kind == kind:
            return self.advance()
        return None

    def expect(self, kind: str, what: str = "") -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            shown = tok.text or "end of input"
            raise ProgramSyntaxError(
                f"expected {what or kind!r}, found {shown!r}", tok.line, tok.column
            )
        return self.advance()

    # commands ---------------------------------------------------------

    def parse_command(self) -> Command:
        left = self.parse_atomic_command()
        if self.accept(";"):
            return Seq(left, self.parse_command())
        return left

    def parse_atomic_command(self) -> Command:
        tok = self.peek()
        if self.accept("skip"):
            return Skip()
        if self.accept("if"):
            cond = self.parse_bexp()
            self.expect("then")
            then_cmd = self.parse_command()
            self.expect("else")
            else_cmd = self.parse_command()
            self.expect("end")
            return If(cond, then_cmd, else_cmd)
        if self.accept("while"):
            cond = self.parse_bexp()
            self.expect("do")
            body = self.parse_command()
            self.expect("end")
            return While(cond, body)
        if self.accept("{"):
            left = self.parse_command()
            self.expect("}")
            self.expect("[")
            prob_tok = self.peek()
            if prob_tok.kind not in ("int", "float"):
                raise ProgramSyntaxError(
                    "expected a probability", prob_tok.line, prob_tok.column
                )
            self.advance()
            prob = float(prob_tok.text)
            if not 0.0 <= prob <= 1.0:
                raise ProgramSyntaxError(
                    f"probability {prob_tok.text} outside [0, 1]",
                    prob_tok.line,
                    prob_tok.column,
                )
            self.expect("]")
            self.expect("{")
            right = self.parse_command()
            self.expect("}")
            return PChoice(prob, left, right)
        if tok.kind == "var":
            self.advance()
            self.expect(":=")
            return Assign(tok.text, self.parse_aexp())
        shown = tok.text or "end of input"
        raise ProgramSyntaxError(f"expected a command, found {shown!r}", tok.line, tok.column)

    # boolean expressions ----------------------------------------------

    def parse_bexp(self) -> Bexp:
        left = self.parse_and()
        while self.accept("or"):
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Bexp:
        left = self.parse_not()
        while self.accept("and"):
            left = And(left, self.parse_not())
        return left

    def parse_not(self) -> Bexp:
        if self.accept("not"):
            return Not(self.parse_not())
        return self.parse_bool_atom()

    def parse_bool_atom(self) -> Bexp:
        if self.accept("true"):
            return BoolLit(True)
        if self.accept("false"):
            return BoolLit(False)
        if self.peek().kind == "(":
            # Either a parenthesized bexp or the left operand of a
            # comparison; try the bexp reading first and backtrack.
            saved = self.pos
            try:
                self.advance()
                inner = self.parse_bexp()
                self.expect(")")
                return inner
            except ProgramSyntaxError:
                self.pos = saved
        left = self.parse_aexp()
        tok = self.peek()
        if tok.kind not in ("=", "!=", "<", "<="):
            shown = tok.text or "end of input"
            raise ProgramSyntaxError(
                f"expected a comparison operator, found {shown!r}",
                tok.line,
                tok.column,
            )
        self.advance()
        return Cmp(tok.kind, left, self.parse_aexp())

    # arithmetic expressions -------------------------------------------

    def parse_aexp(self) -> Aexp:
        left = self.parse_term()
        while True:
            if self.accept("+"):
                left = BinOp("+", left, self.parse_term())
            elif self.accept("-"):
                left = BinOp("-", left, self.parse_term())
            else:
                return left

    def parse_term(self) -> Aexp:
        left = self.parse_factor()
        while self.accept("*"):
            left = BinOp("*", left, self.parse_factor())
        return left

    def parse_factor(self) -> Aexp:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.text))
        if tok.kind == "var":
            self.advance()
            return VarRef(tok.text)
        if tok.kind == "atom":
            self.advance()
            return AtomLit(tok.text)
        if self.accept("("):
            inner = self.parse_aexp()
            self.expect(")")
            return inner
        shown = tok.text or "end of input"
        raise ProgramSyntaxError(
            f"expected an expression, found {shown!r}", tok.line, tok.column
        )


def parse_program(text: str) -> Command:
    """Parse program text into a command AST."""
    parser = _Parser(_tokenize(text))
    cmd = parser.parse_command()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ProgramSyntaxError(
            f"trailing input starting at {tok.text!r}", tok.line, tok.column
        )
    return cmd


# ---------------------------------------------------------------------------
# Pretty-printing (canonical formatting; parse of the output is a fixed point)


def _pretty_aexp(a: Aexp, min_level: int = 0) -> str:
    if isinstance(a, IntLit):
        return str(a.value)
    if isinstance(a, AtomLit):
        return a.name
    if isinstance(a, VarRef):
        return a.name
    level = 2 if a.op == "*" else 1
    text = (
        f"{_pretty_aexp(a.left, level)} {a.op} {_pretty_aexp(a.right, level + 1)}"
    )
    return f"({text})" if level < min_level else text


def _pretty_bexp(b: Bexp, min_level: int = 0) -> str:
    if isinstance(b, BoolLit):
        return "true" if b.value else "false"
    if isinstance(b, Cmp):
        return f"{_pretty_aexp(b.left)} {b.op} {_pretty_aexp(b.right)}"
    if isinstance(b, Not):
        inner = _pretty_bexp(b.operand, 4)
        return f"not {inner}"
    level = 2 if isinstance(b, And) else 1
    op = "and" if isinstance(b, And) else "or"
    text = f"{_pretty_bexp(b.left, level)} {op} {_pretty_bexp(b.right, level + 1)}"
    return f"({text})" if level < min_level else text


def pretty_program(c: Command) -> str:
    """Canonical single-line rendering of a command."""
    if isinstance(c, Skip):
        return "skip"
    if isinstance(c, Assign):
        return f"{c.var} := {_pretty_aexp(c.expr)}"
    if isinstance(c, Seq):
        return f"{pretty_program(c.first)}; {pretty_program(c.second)}"
    if isinstance(c, If):
        return (
            f"if {_pretty_bexp(c.cond)} then {pretty_program(c.then_cmd)} "
            f"else {pretty_program(c.else_cmd)} end"
        )
    if isinstance(c, While):
        return f"while {_pretty_bexp(c.cond)} do {pretty_program(c.body)} end"
    if isinstance(c, PChoice):
        return (
            f"{{ {pretty_program(c.left)} }} [ {c.prob!r} ] "
            f"{{ {pretty_program(c.right)} }}"
        )
    raise TypeError(f"not a command: {c!r}")


# ---------------------------------------------------------------------------
# Expression evaluation


def eval_aexp(a: Aexp, state: Mapping[str, Value]) -> Value:
    if isinstance(a, IntLit):
        return a.value
    if isinstance(a, AtomLit):
        return a.name
    if isinstance(a, VarRef):
        if a.name not in state:
            raise EvalError(f"unbound variable {a.name!r}")
        return state[a.name]
    left = eval_aexp(a.left, state)
    right = eval_aexp(a.right, state)
    if not isinstance(left, int) or not isinstance(right, int):
        raise EvalError(f"arithmetic {a.op!r} applied to a non-integer value")
    if a.op == "+":
        return left + right
    if a.op == "-":
        return left - right
    if a.op == "*":
        return left * right
    raise EvalError(f"unknown arithmetic operator {a.op!r}")


def eval_bexp(b: Bexp, state: Mapping[str, Value]) -> bool:
    if isinstance(b, BoolLit):
        return b.value
    if isinstance(b, Not):
        return not eval_bexp(b.operand, state)
    if isinstance(b, And):
        return eval_bexp(b.left, state) and eval_bexp(b.right, state)
    if isinstance(b, Or):
        return eval_bexp(b.left, state) or eval_bexp(b.right, state)
    left = eval_aexp(b.left, state)
    right = eval_aexp(b.right, state)
    if b.op == "=":
        return left == right and type(left) is type(right)
    if b.op == "!=":
        return not (left == right and type(left) is type(right))
    if not isinstance(left, int) or not isinstance(right, int):
        raise EvalError(f"ordering {b.op!r} applied to a non-integer value")
    return left < right if b.op == "<" else left <= right


def expand_bexp(b: Bexp, frame: JointFrame) -> TupleSet:
    """The tuple set of all frame worlds satisfying a Boolean expression."""
    satisfied = frozenset(
        t for t in frame.tuples() if eval_bexp(b, frame.assignment_of(t))
    )
    return TupleSet(frame, satisfied)


# ---------------------------------------------------------------------------
# Concrete execution


def initial_state(frame: JointFrame, overrides: Optional[Mapping[str, Value]] = None) -> State:
    """Default state: zero where the frame has it, else the first declared
    value; scenario-chosen variables override."""
    state: State = {}
    for name, values in zip(frame.vars, frame.values):
        state[name] = 0 if 0 in values else values[0]
    if overrides:
        state.update(overrides)
    return state


DEFAULT_MAX_STEPS = 100_000


def exec_concrete(
    c: Command,
    state: Mapping[str, Value],
    rng,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> State:
    """Run a command on a single state; probabilistic choice samples from
    ``rng`` (left branch with its stated probability)."""
    budget = [max_steps]

    def run(cmd: Command, sigma: State) -> State:
        budget[0] -= 1
        if budget[0] < 0:
            raise NonTerminationError(
                f"step budget {max_steps} exhausted; program may diverge"
            )
        if isinstance(cmd, Skip):
            return sigma
        if isinstance(cmd, Assign):
            updated = dict(sigma)
            updated[cmd.var] = eval_aexp(cmd.expr, sigma)
            return updated
        if isinstance(cmd, Seq):
            return run(cmd.second, run(cmd.first, sigma))
        if isinstance(cmd, If):
            branch = cmd.then_cmd if eval_bexp(cmd.cond, sigma) else cmd.else_cmd
            return run(branch, sigma)
        if isinstance(cmd, While):
            while eval_bexp(cmd.cond, sigma):
                sigma = run(cmd.body, sigma)
                budget[0] -= 1
                if budget[0] < 0:
                    raise NonTerminationError(
                        f"step budget {max_steps} exhausted; program may diverge"
                    )
            return sigma
        if isinstance(cmd, PChoice):
            branch = cmd.left if rng.random() < cmd.prob else cmd.right
            return run(branch, sigma)
        raise TypeError(f"not a command: {cmd!r}")

    return run(c, dict(state))


# ---------------------------------------------------------------------------
# Lifted execution


@dataclass(frozen=True)
class ExecLimits:
    """Bounds for the lifted loop fixed-point iteration."""

    max_loop_iterations: int = 10_000
    loop_tolerance: float = 1e-9


def exec_lifted(
    c: Command, sm: SubnormalMass, limits: ExecLimits = ExecLimits()
) -> SubnormalMass:
    """Run a command on a subnormal mass.

    Conditionals split the mass on the guard with raw conditioning
    (empty-set weight kept), run both branches, and add the parts;
    probabilistic choice scales instead of conditioning.  Loops
    accumulate the guard-failing part each round and push the rest
    through the body until its non-empty weight drops below tolerance.
    The caller normalizes at program end.
    """
    if isinstance(c, Skip):
        return sm
    if isinstance(c, Assign):
        expr = c.expr
        return mass_update(sm, c.var, lambda sigma: eval_aexp(expr, sigma))
    if isinstance(c, Seq):
        return exec_lifted(c.second, exec_lifted(c.first, sm, limits), limits)
    if isinstance(c, If):
        guard = expand_bexp(c.cond, sm.frame)
        then_part = exec_lifted(c.then_cmd, condition_unnormalized(sm, guard), limits)
        else_part = exec_lifted(
            c.else_cmd, condition_unnormalized(sm, guard.complement()), limits
        )
        return weighted_sum([(1.0, then_part), (1.0, else_part)])
    if isinstance(c, While):
        guard = expand_bexp(c.cond, sm.frame)
        not_guard = guard.complement()
        done = SubnormalMass.zero(sm.frame)
        cur = sm
        for _ in range(limits.max_loop_iterations):
            done = weighted_sum(
                [(1.0, done), (1.0, condition_unnormalized(cur, not_guard))]
            )
            # Empty-set weight inside the loop is inert (it can never
            # rejoin a nonempty focal set) but would compound across
            # rounds; shed it from the circulating part only.
            looping = _drop_empty(condition_unnormalized(cur, guard))
            if looping.total() < limits.loop_tolerance:
                return done
            cur = exec_lifted(c.body, looping, limits)
        raise NonTerminationError(
            f"loop keeps mass {cur.nonempty_total():.3e} after "
            f"{limits.max_loop_iterations} iterations; program may not terminate"
        )
    if isinstance(c, PChoice):
        left = exec_lifted(c.left, _scale(sm, c.prob), limits)
        right = exec_lifted(c.right, _scale(sm, 1.0 - c.prob), limits)
        return weighted_sum([(1.0, left), (1.0, right)])
    raise TypeError(f"not a command: {c!r}")


def _scale(sm: SubnormalMass, weight: float) -> SubnormalMass:
    return weighted_sum([(weight, sm)]) if weight != 1.0 else sm


def _drop_empty(sm: SubnormalMass) -> SubnormalMass:
    empty = TupleSet.empty(sm.frame)
    return SubnormalMass(
        sm.frame, {ts: m for ts, m in sm.items() if ts != empty}
    )
