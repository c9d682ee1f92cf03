"""exceptions."""

from __future__ import annotations

from typing import Sequence

__all__ = [
    'CfinvarException',
    'CycleError',
    'InfeasibleError',
    'InvalidQueryError',
    'ParseError',
    'ResourceLimitError',
    'UnsupportedStructureError',
    'ValidationError',
    'ZeroProbabilityError',
]


class CfinvarException(Exception):
    """Base class for all cfinvar related exceptions.

    `exit_code` is the process exit code the command line front end uses for the error.
    """

    exit_code = 1


class ParseError(CfinvarException):
    """Syntax or schema error in a model, graph or observation document.

    Args:
        message (str): what went wrong.
        line (int, optional): 1-based line of the offending text. Default: None.
        position (int, optional): 0-based character offset of the offending text. Default: None.

    """

    def __init__(self, message: str, line: int | None = None, position: int | None = None) -> None:  # noqa: D107
        self.message = message
        self.line = line
        self.position = position
        location = []
        if line is not None:
            location.append(f'line {line}')
        if position is not None:
            location.append(f'position {position}')
        super().__init__(f'{message} ({", ".join(location)})' if location else message)


class ValidationError(CfinvarException):
    """A model or graph violates its invariants.

    Args:
        violations (Sequence[str]): the violations reported by validation.

    """

    def __init__(self, violations: Sequence[str]) -> None:  # noqa: D107
        self.violations = tuple(violations)
        super().__init__('invalid model: ' + '; '.join(self.violations))


class InvalidQueryError(CfinvarException):
    """Unknown variable or value, malformed query, or inconsistent arguments."""


class ZeroProbabilityError(InvalidQueryError):
    """An intervened level or a conditioning event has probability zero."""


class CycleError(CfinvarException):
    """The graph has a directed cycle."""

    def __init__(self, cycle: Sequence[str]) -> None:  # noqa: D107
        self.cycle = tuple(cycle)
        super().__init__('graph has a cycle: ' + ' -> '.join([*self.cycle, self.cycle[0]]))


class UnsupportedStructureError(CfinvarException):
    """The graph shape is outside what an analysis supports (e.g. a non-root intervened variable)."""

    exit_code = 2


class ResourceLimitError(CfinvarException):
    """An enumeration would exceed the configured size limit."""

    exit_code = 3

    def __init__(self, what: str, size: int, limit: int) -> None:  # noqa: D107
        self.size = size
        self.limit = limit
        super().__init__(f'{what} has {size} elements, more than the configured limit {limit}')


class InfeasibleError(CfinvarException):
    """A linear constraint system has no solution."""
