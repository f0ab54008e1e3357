"""Exception hierarchy for dsflow.

The CLI maps these onto exit codes: scenario/program input problems exit
with 2, conflict and non-termination conditions with 3, internal
invariant violations with 4.
"""


class DsflowError(Exception):
    """Base class for all dsflow errors."""


class FrameError(DsflowError):
    """Invalid frame construction or use of incompatible frames."""


class MassError(DsflowError):
    """Invalid mass function: bad masses, bad focal sets, broken normalization."""


class TotalConflictError(DsflowError):
    """Evidence combination or conditioning with no compatible focal pair.

    Raised when the normalization constant of Dempster's rule would be
    infinite (k^-1 = 0), or when normalizing a mass whose weight sits
    entirely on the empty set.
    """


class ProgramSyntaxError(DsflowError):
    """Syntax error in program text, with source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class EvalError(DsflowError):
    """Expression evaluation error: unbound variable or wrong value kind."""


class NonTerminationError(DsflowError):
    """Execution did not settle within its budget.

    Concrete runs raise this when the step budget runs out; lifted runs
    raise it when a loop still carries mass above tolerance at the
    iteration cap.
    """


class ScenarioError(DsflowError):
    """Malformed or inconsistent scenario file."""


class InternalError(DsflowError):
    """A library invariant was violated; indicates a bug, not bad input."""
