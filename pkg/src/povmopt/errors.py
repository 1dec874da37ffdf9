"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands are non-square or have incompatible shapes/counts."""


class PreconditionError(ValueError):
    """An operation's admissibility condition is violated."""


class ValidationError(ValueError):
    """An ensemble, POVM, or input file fails its invariants."""


class NumericalError(RuntimeError):
    """A dense solver failed to converge or produced unusable output."""
