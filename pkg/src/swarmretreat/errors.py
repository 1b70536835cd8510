"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument or configuration field violates its contract."""


class NotReadyError(RuntimeError):
    """A windowed quantity was requested before the measurement horizon elapsed."""


class UnboundedObjectiveError(RuntimeError):
    """The density objective has no interior maximum (zero deployment cost)."""


class NumericalFailureError(RuntimeError):
    """A numerical solve failed (singular or reducible generator, etc.)."""
