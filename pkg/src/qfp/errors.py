"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter is outside its documented domain."""


class InputSizeError(ParameterError):
    """An input is longer than the code can accept."""


class DimensionError(ValueError):
    """Mismatched lengths between bit strings, codewords or tallies."""


class DomainError(ValueError):
    """Arguments violate a distribution's support constraints."""


class CapacityError(RuntimeError):
    """The requested computation exceeds a configured size cap."""


class InfeasibleError(RuntimeError):
    """No parameter value within the search bracket can meet the target."""


class FormatError(ValueError):
    """Malformed serialized data. ``offset`` is the byte where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class DegenerateParametersError(ParameterError):
    """Parameters make the requested quantity undefined (e.g. no click source)."""
