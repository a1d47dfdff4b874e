"""Exception types shared across the toolkit.

Two classes of failure are distinguished because the CLI maps them to
different exit codes: bad input or an unmet precondition (exit 1) versus a
broken internal invariant that indicates a bug (exit 2).
"""


class PreconditionError(ValueError):
    """Raised when an operation's stated precondition does not hold."""


class InternalInvariantError(AssertionError):
    """Raised when an internal invariant that should be unbreakable breaks."""
