"""Exception hierarchy shared by every module."""


class CocycleLabError(Exception):
    """Base class; ``module`` and ``operation`` let the CLI say where it broke."""

    module = "cocycle_lab"

    def __init__(self, message, *, operation=None):
        super().__init__(message)
        self.operation = operation


class InvalidParameter(CocycleLabError, ValueError):
    pass


class ValidationError(CocycleLabError, ValueError):
    pass


class ResourceLimitError(CocycleLabError):
    pass


class NumericalInconsistency(CocycleLabError, ArithmeticError):
    pass


class DegenerateActionError(CocycleLabError):
    pass


class NotApplicableError(CocycleLabError):
    pass


class UnsupportedRangeError(CocycleLabError):
    pass


class DomainError(CocycleLabError, ValueError):
    pass


class SymbolEvaluationError(CocycleLabError):
    def __init__(self, message, *, element=None, operation=None):
        super().__init__(message, operation=operation)
        self.element = element


class CarrierClosureError(CocycleLabError):
    """A product with nonzero weight left a partial carrier (word ball, lattice box)."""
