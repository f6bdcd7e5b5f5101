"""Exception types shared across the pipeline."""


class CoocnetError(Exception):
    """Base class for errors raised by coocnet."""


class DataError(CoocnetError, ValueError):
    """Input data is malformed or internally inconsistent."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class ConfigurationError(CoocnetError, ValueError):
    """A pipeline option or option combination is invalid."""
