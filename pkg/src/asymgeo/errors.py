"""Exception hierarchy shared by every module."""


class AsymGeoError(Exception):
    """Base class for all library errors."""


class SpaceMismatch(AsymGeoError, ValueError):
    """Two objects live on different sample spaces (or dimensions)."""


class NegativeWeight(AsymGeoError, ValueError):
    pass


class ParseError(AsymGeoError, ValueError):
    pass


class UnknownLabel(ParseError):
    pass


class DomainError(AsymGeoError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class NotFinite(DomainError):
    pass


class BracketError(AsymGeoError, RuntimeError):
    """A monotone root could not be bracketed within the iteration budget."""


class MonotonicityError(AsymGeoError, RuntimeError):
    pass


class LPCyclingError(AsymGeoError, RuntimeError):
    pass


class MarginalMismatch(AsymGeoError, ValueError):
    def __init__(self, message, row_marginal=None, column_marginal=None):
        super().__init__(message)
        self.row_marginal = row_marginal
        self.column_marginal = column_marginal
