"""Exception types shared across the package."""


class EmdofError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(EmdofError, ValueError):
    """An argument is outside its documented range."""


class KindMismatchError(EmdofError, TypeError):
    """A loss model of the wrong kind was supplied."""


class DecompositionError(EmdofError, RuntimeError):
    """A matrix factorization failed (singular or indefinite input)."""


class MalformedFileError(EmdofError, ValueError):
    """An input file does not conform to its documented format."""


class NoChannelError(EmdofError, ValueError):
    """All channel efficiencies are zero; no power allocation exists."""
