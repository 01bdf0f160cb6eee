"""Shared exception types.

Everything raised on bad input derives from ValueError so callers that
do not care about the fine-grained class can catch one thing.
"""


class ReachkeepError(ValueError):
    pass


class ParseError(ReachkeepError):
    """Malformed text input. Carries the 1-based line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class BoundsError(ReachkeepError):
    """A vertex or path id is outside the declared range."""


class ParameterError(ReachkeepError):
    """A numeric parameter is outside its documented domain."""


class CyclicGraphError(ReachkeepError):
    """A DAG-only entry point received a graph with a directed cycle."""


class InfeasiblePairError(ReachkeepError):
    """The requested demand pair is not reachable in the input graph."""


class SizeLimitError(ReachkeepError):
    """Input exceeds the size regime an exhaustive routine accepts."""


class MissingEntryError(ReachkeepError, KeyError):
    """A table or index lookup had no entry for the requested key."""
