"""Exception types raised by the library."""


class RieszExtError(Exception):
    """Base class for all library errors."""


class InvalidDimensionError(RieszExtError, ValueError):
    pass


class ParameterError(RieszExtError, ValueError):
    """A numeric parameter is outside its admissible range."""


class DomainError(RieszExtError, ValueError):
    """An evaluation point lies outside the region where an operator is defined."""


class SingularConfigurationError(RieszExtError, ValueError):
    """The kernel is singular at the requested configuration."""


class UnsupportedConfigurationError(RieszExtError, NotImplementedError):
    """The (domain, representation) pair is not supported."""


class DegenerateInputError(RieszExtError, ValueError):
    """Input data is degenerate, e.g. identically zero."""


class EvaluationError(RieszExtError, FloatingPointError):
    """A field produced a non-finite value at a quadrature node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node
