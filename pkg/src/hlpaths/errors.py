"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (bad column mapping, unknown
    feature type, parameter out of range). CLI maps this to exit code 2."""


class LogParseError(ValueError):
    """Malformed input data. Carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SpecError(ValueError):
    """Infeasible synthetic-log specification."""
