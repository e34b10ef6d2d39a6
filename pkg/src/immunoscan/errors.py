"""Exception types shared across the package."""


class ImmunoscanError(Exception):
    """Base class for all domain errors raised by this package."""


class PanelFormatError(ImmunoscanError):
    """Malformed panel CSV input (bad header, row shape, or literal)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateCellError(PanelFormatError):
    """The same (entity, year, feature) cell appears more than once."""


class IncompletePanelError(ImmunoscanError):
    """At least one (entity, year, feature) combination has no value."""


class PanelInvariantError(ImmunoscanError):
    """A panel violates its structural invariants."""


class EntityNotFoundError(ImmunoscanError):
    """Requested entity identifier is not present in the panel."""


class NoCandidatesError(ImmunoscanError):
    """A split was requested on a panel with no candidate entities."""


class InsufficientHistoryError(ImmunoscanError):
    """An operation needs at least two years of data."""


class InvalidParameterError(ImmunoscanError):
    """A numeric or enumerated parameter is out of its allowed domain."""


class ShapeMismatchError(ImmunoscanError):
    """Two values that must share an axis do not."""


class NoSignalError(ImmunoscanError):
    """Every feature was excluded from averaging, leaving no score.

    Carries the offending trial index when raised from the trial
    harness (None when raised from a direct scoring call).
    """

    def __init__(self, message, trial=None):
        if trial is not None:
            message = f"trial {trial}: {message}"
        super().__init__(message)
        self.trial = trial


class UndefinedCorrelationError(ImmunoscanError):
    """Pearson correlation is undefined for a constant vector."""


class InsufficientFeaturesError(ImmunoscanError):
    """Correlation needs vectors of length at least two."""
