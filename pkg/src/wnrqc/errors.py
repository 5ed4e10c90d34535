"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A constructor or operation was given an out-of-range parameter."""


class CapacityError(RuntimeError):
    """A requested problem size exceeds the configured exact-engine cap."""


class DegenerateInputError(ValueError):
    """Inputs are in a regime where the requested quantity is undefined
    (e.g. bound computation before any collision signal exists)."""


class SchemaError(ValueError):
    """A serialized artifact carries an unknown or mismatched schema version."""
