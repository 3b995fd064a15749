"""Exception types shared across the package."""


class VotePatternsError(Exception):
    """Base class for data-level errors raised by this package."""


class ParseError(VotePatternsError):
    """Malformed input file. Carries the offending file and line number."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f" [{path}" + (f":{line}" if line is not None else "") + "]"
        super().__init__(message + where)


class EmptySelectionError(VotePatternsError):
    """A filter left no voters or no roll-calls."""
