"""Exception hierarchy.

Three families map onto CLI exit codes: validation problems (2), predictor
failures (3) and numerical failures (4).
"""


class GreenLimeError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(GreenLimeError, ValueError):
    exit_code = 2


class NumericalError(GreenLimeError, ArithmeticError):
    exit_code = 4


class PredictorFailure(GreenLimeError):
    """The black-box model could not produce a prediction."""

    exit_code = 3

    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class EmptyData(ValidationError):
    pass


class ConstantColumn(ValidationError):
    def __init__(self, column):
        super().__init__(f"column {column} has zero standard deviation")
        self.column = column


class DimensionMismatch(ValidationError):
    pass


class NonFiniteInput(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class TooFewUnits(ValidationError):
    pass


class RankDeficient(NumericalError):
    pass


class SingularInformation(NumericalError):
    pass


class NoInteriorMinimum(NumericalError):
    pass


class DegenerateWeights(NumericalError):
    pass


class DegenerateVariance(NumericalError):
    pass


class ProcessSpawnFailure(PredictorFailure):
    pass


class ProtocolViolation(PredictorFailure):
    pass


class PredictorTimeout(PredictorFailure):
    pass
