"""Exception types raised by the decision procedures."""


class SigmaTorusError(ValueError):
    """Base class for input and hypothesis errors."""


class ZeroPolynomialError(SigmaTorusError):
    pass


class ZeroSeriesError(SigmaTorusError):
    pass


class InsufficientPrecision(SigmaTorusError):
    pass


class HenselError(SigmaTorusError):
    """Raised when the Hensel hypothesis fails or the derivative valuation drifts."""


class HypothesisViolated(SigmaTorusError):
    pass


class PrecisionCapExceeded(SigmaTorusError):
    """Interval refinement hit the bit cap.

    This almost always means a declared Q-linear independence of exponent
    weights is false.
    """


class SingularMatrixError(SigmaTorusError):
    pass
