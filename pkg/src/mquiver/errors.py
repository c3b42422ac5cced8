"""Exception hierarchy for mquiver."""


class MQuiverError(Exception):
    """Base class for all library errors."""


class SingularMatrix(MQuiverError, ArithmeticError):
    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


class ChainLengthMismatch(MQuiverError, ValueError):
    pass


class NotASolution(MQuiverError, ValueError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InvalidQuiver(MQuiverError, ValueError):
    pass


class InvalidScalars(MQuiverError, ValueError):
    pass


class InvalidGauge(MQuiverError, ValueError):
    pass


class NotSurjective(MQuiverError, ValueError):
    pass


class DeterminantFixupFailed(MQuiverError, ArithmeticError):
    pass


class NotUnitriangularLeading(MQuiverError, ValueError):
    pass


class ZeroDiagonal(MQuiverError, ValueError):
    pass


class InvalidBorel(MQuiverError, ValueError):
    pass


class InvalidRootIndex(MQuiverError, IndexError):
    pass


class NotUnipotent(MQuiverError, ValueError):
    pass


class NotBorel(MQuiverError, ValueError):
    pass


class InvalidTorusLevel(MQuiverError, ValueError):
    pass


class InvalidPoint(MQuiverError, ValueError):
    pass


class ZeroE(MQuiverError, ZeroDivisionError):
    pass


class NotUnitary(MQuiverError, ValueError):
    pass


class NotUnitModulus(MQuiverError, ValueError):
    pass


class InvalidAlcovePoint(MQuiverError, ValueError):
    pass


class ParseError(MQuiverError, ValueError):
    """Malformed input document.

    ``line`` and ``field`` locate the problem when known.
    """

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field
