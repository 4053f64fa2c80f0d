"""Exception types shared across the package."""


class FrobhhError(Exception):
    """Base class for all package errors."""


class FieldMismatch(FrobhhError):
    pass


class DivisionByZero(FrobhhError):
    pass


class InvalidField(FrobhhError):
    pass


class NonAssociative(FrobhhError):
    pass


class InvalidPresentation(FrobhhError):
    pass


class DegenerateForm(FrobhhError):
    pass


class NotAutomorphism(FrobhhError):
    pass


class NotDiagonalizable(FrobhhError):
    pass


class NotASubspace(FrobhhError):
    pass


class DegreeMismatch(FrobhhError):
    pass


class IndexOutOfRange(FrobhhError):
    pass


class MixedComplexes(FrobhhError):
    pass


class BudgetExceeded(FrobhhError):
    pass


class DegreeOutOfWindow(FrobhhError):
    pass


class InadmissibleCharacteristic(FrobhhError):
    pass


class ValidationFailure(FrobhhError):
    pass


class InputError(FrobhhError):
    """Bad user input (files, CLI arguments, expressions)."""
