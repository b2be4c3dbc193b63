"""Exception and warning classes shared across the package."""


class EyeStateError(Exception):
    """Base class for all errors raised by this package."""


class DataError(EyeStateError, ValueError):
    """Input data violates a documented contract."""


class ParseError(DataError):
    """A file could not be parsed."""


class MalformedHeader(ParseError):
    pass


class EmptyData(ParseError):
    pass


class RaggedRow(ParseError):
    pass


class NonNumericValue(ParseError):
    pass


class InvalidLabel(DataError):
    pass


class DegenerateChannel(DataError):
    pass


class EmptySubset(DataError):
    pass


class NotCentered(DataError):
    pass


class InsufficientTransitions(DataError):
    pass


class SingleClass(DataError):
    pass


class MismatchedChannels(DataError):
    pass


class UnsupportedFormat(EyeStateError, ValueError):
    pass


class MissingBaseReport(EyeStateError):
    pass


class DegenerateInputWarning(UserWarning):
    """A variable had zero range; its mutual information was reported as 0."""


class ConvergenceWarning(UserWarning):
    """An iterative solver stopped at its iteration cap."""
