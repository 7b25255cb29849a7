"""Exception hierarchy shared by the pipeline stages.

Each error carries the process exit code the command-line front end maps it to.
"""

from __future__ import annotations


class GroupEvoError(Exception):
    exit_code = 1


class InputError(GroupEvoError):
    """Bad or unusable input data (exit code 1)."""


class EmptyLog(InputError):
    pass


class UnparseableTimestamp(InputError):
    def __init__(self, line_no: int, value: str):
        super().__init__(f"line {line_no}: cannot parse timestamp {value!r}")
        self.line_no = line_no
        self.value = value


class WindowLargerThanSpan(InputError):
    pass


class FrameMismatch(InputError):
    pass


class EmptyGroup(InputError):
    pass


class InfeasibleScript(InputError):
    pass


class VerificationFailure(GroupEvoError):
    exit_code = 2


class NonConvergence(GroupEvoError):
    exit_code = 3

    def __init__(self, iterations: int, residual: float):
        super().__init__(
            f"social position did not converge after {iterations} iterations "
            f"(residual {residual:.3e})"
        )
        self.iterations = iterations
        self.residual = residual
