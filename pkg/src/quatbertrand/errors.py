"""Exception hierarchy.

Every error carries the CLI exit code of its class:
2 mathematical rejection, 3 degeneracy or failed precondition, 4 input error.
"""


class QuatCurveError(Exception):
    exit_code = 1


class InputError(QuatCurveError):
    exit_code = 4


class ParseError(InputError):
    """Expression syntax error; ``offset`` is the 1-based byte position."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.reason = message
        self.offset = offset


class CurveSpecError(InputError):
    pass


class UnknownCurveError(InputError):
    pass


class DegeneracyError(QuatCurveError):
    exit_code = 3


class SingularEvaluationError(DegeneracyError, ArithmeticError):
    pass


class NotUnitSpeedError(DegeneracyError):
    pass


class VanishingCurvatureError(DegeneracyError):
    pass


class NonzeroBitorsionError(DegeneracyError):
    pass


class BitorsionTooSmallError(DegeneracyError):
    pass


class PreconditionError(DegeneracyError):
    pass


class CorrespondenceError(DegeneracyError):
    pass


class OrderExceededError(QuatCurveError, ValueError):
    pass


class RejectionError(QuatCurveError):
    exit_code = 2


class NotNB2CurveError(RejectionError):
    pass


class ConstructionFailedError(RejectionError):
    pass
