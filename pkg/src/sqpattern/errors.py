"""Exception hierarchy. CLI exit codes key off these classes."""


class SqpatternError(Exception):
    """Base class for recoverable input/usage errors."""


class NonPrime(SqpatternError):
    pass


class EvenCharacteristic(SqpatternError):
    pass


class DegreeError(SqpatternError):
    pass


class CeilingExceeded(SqpatternError):
    pass


class FieldMismatch(SqpatternError):
    pass


class DimensionMismatch(SqpatternError):
    pass


class HomogeneityError(SqpatternError):
    pass


class ZeroPolynomial(SqpatternError):
    pass


class SingularQuadric(SqpatternError):
    pass


class ParseError(SqpatternError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class InvariantViolation(RuntimeError):
    """An identity that must hold exactly did not. Signals a bug, never bad input."""


class CalibrationError(InvariantViolation):
    pass
