"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument does not conform to the game or partition dimensions."""


class ResourceError(RuntimeError):
    """A computation would exceed a configured size budget."""


class InternalConsistencyError(RuntimeError):
    """A process invariant was violated; indicates a bug rather than bad input."""


class ConfigError(ValueError):
    """Configuration failed validation.

    ``errors`` holds one ``(field_path, message)`` pair per problem found.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = [f"{path or '<root>'}: {msg}" for path, msg in self.errors]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))
