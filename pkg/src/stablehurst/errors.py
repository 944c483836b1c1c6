"""Exception hierarchy shared by the library and the command line."""


class StableHurstError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(StableHurstError, ValueError):
    """An argument lies outside the domain of the function."""


class ValidationError(StableHurstError, ValueError):
    """A structured input (filter, parameters, config) failed validation."""


class ConfigurationError(ValidationError):
    """A simulation or experiment configuration is inconsistent."""


class NumericError(StableHurstError, ArithmeticError):
    """A numerical routine failed to reach its stated accuracy."""


class DegenerateInputError(NumericError):
    """The data make a statistic undefined (e.g. a zero increment with beta < 0)."""
