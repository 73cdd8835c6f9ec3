"""Exception hierarchy shared by every module of the package."""


class NonsingularError(Exception):
    """Base class for all package errors."""


class FieldError(NonsingularError, ValueError):
    """Invalid field parameters or an illegal field operation."""


class FieldMismatchError(FieldError):
    """Operands belong to different fields."""


class PolySyntaxError(NonsingularError, ValueError):
    """A polynomial string does not conform to the grammar."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class BudgetExceededError(NonsingularError):
    """A configured search or enumeration budget would be exceeded.

    This is never a verdict: callers must treat it as "undecided".
    """


class PreconditionError(NonsingularError, ValueError):
    """An operation was called outside its documented preconditions."""


class SlicesExhaustedError(NonsingularError):
    """The slicing search drew ``max_slices`` slices without certifying a point."""

    def __init__(self, message, slices_tried=0, bad=0, undecided=0):
        super().__init__(message)
        self.slices_tried = slices_tried
        self.bad = bad
        self.undecided = undecided


class InvariantViolation(NonsingularError, AssertionError):
    """An internal cross-check failed; this always indicates a bug."""
