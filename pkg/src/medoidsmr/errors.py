"""Exception hierarchy shared across the package."""


class MedoidsError(Exception):
    """Base class for every error raised by medoidsmr."""


class InvalidInputError(MedoidsError, ValueError):
    """Arguments violate an operation's preconditions."""


class DegenerateDatasetError(MedoidsError, ValueError):
    """The dataset cannot support the request, e.g. fewer distinct points than k."""


class CapacityError(MedoidsError, ValueError):
    """An exhaustive computation would exceed its configured size limit."""


class ParseError(MedoidsError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(ParseError):
    """Rows disagree on dimension or id layout."""


class JobFailure(MedoidsError, RuntimeError):
    """A map or reduce task raised; ``split_id`` or ``key`` names the culprit."""

    def __init__(self, message, split_id=None, key=None):
        self.split_id = split_id
        self.key = key
        where = []
        if split_id is not None:
            where.append(f"split {split_id}")
        if key is not None:
            where.append(f"key {key!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class DeterminismError(MedoidsError, RuntimeError):
    """Benchmark cells that should agree produced different clusterings."""
