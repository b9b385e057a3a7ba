class TPassError(Exception):
    """Base class for errors raised by tpass."""


class DimensionMismatch(TPassError, ValueError):
    pass


class RankError(TPassError, ValueError):
    pass


class MalformedSpectrum(TPassError, ValueError):
    """Spectrum is not the transform of a real tensor."""


class PlanError(TPassError, ValueError):
    pass


class TheoryPreconditionError(TPassError, ValueError):
    """A bound was requested outside the hypotheses it is stated under."""


class FormatError(TPassError, ValueError):
    pass
