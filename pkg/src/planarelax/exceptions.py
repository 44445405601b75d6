"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of an operation."""


class EvaluationError(ArithmeticError):
    """An energy or derivative evaluation produced a non-finite value."""


class EnvelopeUndefined(ValueError):
    """The requested envelope does not exist (function unbounded below)."""


class UnsupportedRepresentation(TypeError):
    """The energy does not provide the representation required here."""


class NothingToRefine(ValueError):
    """Double-tangent refinement was requested but no chord exists."""
