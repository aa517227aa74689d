"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: bad input syntax or malformed JSON -> 2,
PreconditionError -> 3, VerificationError -> 4, ResourceLimitError -> 5.
Plain ValueError covers invalid arguments at the library level.
"""


class PreconditionError(ValueError):
    """An operation's stated precondition does not hold for the given input
    (e.g. asking for marginal structure of a signaling model)."""


class VerificationError(RuntimeError):
    """A cross-check that must hold by construction failed; carries enough
    detail to locate the mismatch."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details


class ResourceLimitError(RuntimeError):
    """The requested computation exceeds a hard enumeration guard."""
