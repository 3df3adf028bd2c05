"""Exception hierarchy shared across the toolkit."""


class GdaError(Exception):
    """Base class for every error raised by gdakit."""


class DimensionMismatch(GdaError, ValueError):
    pass


class NumericDegeneracy(GdaError, ArithmeticError):
    """Base for failures caused by singular or ill-posed numerics."""


class NotPositiveDefinite(NumericDegeneracy):
    pass


class NoConvergence(NumericDegeneracy):
    pass


class DegenerateMeans(NumericDegeneracy):
    pass


class DegenerateComponent(NumericDegeneracy):
    pass


class NoCrossing(NumericDegeneracy):
    pass


class DataError(GdaError, ValueError):
    """Base for problems with the supplied data rather than the numerics."""


class EmptyDataset(DataError):
    pass


class EmptyClass(DataError):
    pass


class InsufficientSamples(DataError):
    pass


class TooFewPoints(DataError):
    pass


class NotDistanceMatrix(DataError):
    pass


class PriorSumInvalid(DataError):
    pass


class NotBinary(DataError):
    pass


class NonPlanarModel(DataError):
    pass


class UnknownScenario(GdaError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown scenario"
