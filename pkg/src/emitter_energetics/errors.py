"""Exception hierarchy shared by every module of the package."""


class EnergeticsError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(EnergeticsError, ValueError):
    """A parameter violates an operation's precondition."""


class OutOfRangeError(InvalidArgumentError):
    """A physical input lies outside the modelled range."""


class DegenerateStateError(EnergeticsError, ValueError):
    """The photonic state carries no one-photon weight where one is needed."""


class DegenerateInputError(EnergeticsError, ValueError):
    """A normalisation denominator vanishes."""


class UnmatchedIntensityError(EnergeticsError, ValueError):
    """Classical and photonic inputs are not intensity matched."""


class DegenerateHistogramError(EnergeticsError, ValueError):
    """A coincidence histogram cannot be normalised."""


class DegenerateFitError(EnergeticsError, ValueError):
    """The fit basis vanishes at every sample point."""


class InsufficientDataError(EnergeticsError, ValueError):
    """Not enough usable samples for the requested estimator."""


class CsvFormatError(EnergeticsError, ValueError):
    """Malformed CSV input; carries the 1-based offending line number."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
