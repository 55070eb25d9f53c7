class InvalidParameterError(ValueError):
    """A numeric or categorical parameter is outside its allowed range."""


class InvalidInputError(ValueError):
    """An input object is structurally unsuitable for the requested operation."""


class ConfigError(ValueError):
    """Malformed scenario configuration, trace schema or transform registry lookup."""


class InsufficientDataError(ValueError):
    """Too few samples or intervals to form an estimate.

    Partial results computed before the failure are attached as attributes.
    """

    def __init__(self, message, **partial):
        super().__init__(message)
        self.partial = partial
        for key, value in partial.items():
            setattr(self, key, value)
