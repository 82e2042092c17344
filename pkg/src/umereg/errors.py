"""Exception types shared across the toolkit."""


class InvalidInputError(ValueError):
    """Input violates a documented precondition (empty cloud, size mismatch, ...)."""


class DegenerateGeometryError(InvalidInputError):
    """Geometry too degenerate to proceed (collinear cloud, rank-deficient moments)."""

    def __init__(self, message, flags=()):
        super().__init__(message)
        self.flags = frozenset(flags)


class ConfigError(ValueError):
    """Malformed configuration (non-monotone bin edges, bad key=value file, ...)."""


class ParseError(ValueError):
    """File failed to parse; carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
