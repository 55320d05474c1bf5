"""Error types shared across the library.

``ValueError`` covers malformed inputs (bad parameters, out-of-domain
arguments).  The two classes below separate the remaining failure modes so
callers can tell a violated mathematical precondition from a numerical
routine that did not converge.
"""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""


class NumericError(RuntimeError):
    """A numerical routine failed to reach its accuracy target.

    The ``details`` mapping carries diagnostics (achieved residuals,
    subdivision counts) for error reports.
    """

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = dict(details)
