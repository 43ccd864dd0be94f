class PunchkitError(Exception):
    """Base class for all punchkit errors."""


class ValidationError(PunchkitError):
    """Raised when an input file, parameter, or config violates its contract."""

    def __init__(self, message: str, stage: str | None = None):
        super().__init__(message)
        self.stage = stage


class NotFoundError(PunchkitError):
    """Raised when a speech, snippet, or sentence id does not exist."""
