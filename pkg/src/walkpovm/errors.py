"""Exception hierarchy shared by all modules."""


class WalkError(Exception):
    """Base class for walkpovm errors."""


class DomainError(WalkError, ValueError):
    """A parameter lies outside its admissible range."""


class NonUnitaryCoin(WalkError, ValueError):
    """A user-supplied coin matrix failed the unitarity check."""


class ZeroWeight(WalkError):
    """Conditioning on a position that carries no probability."""


class DegenerateSuperposition(DomainError):
    """The requested superposition has vanishing norm."""


class LeakageError(WalkError):
    """Probability found outside the expected outcome positions."""


class BadDistribution(WalkError, ValueError):
    """A probability map is negative or does not sum to one."""


class ProtocolFileError(WalkError, ValueError):
    """A protocol file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
