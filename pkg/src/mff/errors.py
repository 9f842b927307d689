"""Exception hierarchy.

Every domain error derives from :class:`MFFError`; the class name doubles as
the machine-readable error code the CLI prints.
"""


class MFFError(Exception):
    """Base class for all domain errors raised by :mod:`mff`."""

    @property
    def code(self) -> str:
        return type(self).__name__


# series / IO
class MissingFile(MFFError, FileNotFoundError):
    pass


class MissingColumn(MFFError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class NonNumericValue(MFFError, ValueError):
    """A value cell could not be parsed; ``row`` is the 1-based data row."""

    def __init__(self, row: int, raw: str = ""):
        super().__init__(f"non-numeric value {raw!r} in data row {row}")
        self.row = row
        self.raw = raw


class EmptySeries(MFFError, ValueError):
    pass


class WindowTooLarge(MFFError, ValueError):
    pass


class WindowNonPositive(MFFError, ValueError):
    pass


class Mismatch(MFFError, ValueError):
    pass


class InsufficientExamples(MFFError, ValueError):
    pass


class TooFewExamples(MFFError, ValueError):
    pass


# features
class SliceTooShort(MFFError, ValueError):
    pass


class FeatureError(MFFError, ValueError):
    """A feature function failed on a particular slice."""

    def __init__(self, name: str, ordinal: int, cause: Exception):
        super().__init__(f"feature {name!r} failed on slice {ordinal}: {cause}")
        self.name = name
        self.ordinal = ordinal
        self.cause = cause


class EmptyTrainRange(MFFError, ValueError):
    pass


# net / optim
class ShapeMismatch(MFFError, ValueError):
    pass


class LengthMismatch(MFFError, ValueError):
    pass


class EmptyInput(MFFError, ValueError):
    pass


class NonFiniteGradient(MFFError, FloatingPointError):
    pass


# train
class SeriesTooShort(MFFError, ValueError):
    pass


class NonFiniteLoss(MFFError, FloatingPointError):
    def __init__(self, epoch: int, loss: float):
        super().__init__(f"loss became non-finite ({loss}) at epoch {epoch}")
        self.epoch = epoch
        self.loss = loss


class ScalerMissing(MFFError, ValueError):
    pass


class RangeOutOfBounds(MFFError, IndexError):
    pass


# metrics
class TooFewValues(MFFError, ValueError):
    pass
