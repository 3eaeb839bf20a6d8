"""Exception types shared across the package."""


class UsageError(ValueError):
    """The caller violated a documented precondition or passed malformed input."""


class ResourceLimitError(RuntimeError):
    """An operation would exceed a configured enumeration or dimension cap."""


class InternalError(RuntimeError):
    """An internal consistency check failed; indicates a bug, not a user error."""
