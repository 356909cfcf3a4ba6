"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
data/ingestion problems with 3, numerical failures with 4.
"""


class DimensionError(ValueError):
    """Array shapes or vector lengths do not conform."""


class ConfigurationError(ValueError):
    """An option value is out of its legal range (e.g. k > n)."""


class DomainError(ValueError):
    """Input data violates a method's domain (e.g. negative entries for NMF)."""


class ParseError(ValueError):
    """A data file could not be parsed; message carries the line number."""


class EmptyInputError(ParseError):
    """A data file contains no records."""


class ValidationError(ValueError):
    """Parsed data violates a semantic constraint (range, coverage, ...)."""


class NumericalError(RuntimeError):
    """A numerical routine failed to produce a usable result."""
