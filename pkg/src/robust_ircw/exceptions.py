"""Exception types raised across the package."""


class IrcwError(Exception):
    """Base class for all package errors."""


class DimensionError(IrcwError, ValueError):
    """Vector lengths disagree or a vector is empty."""


class DomainError(IrcwError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class SolverError(IrcwError, RuntimeError):
    """An iterative solver failed to converge."""


class PreconditionError(IrcwError, ValueError):
    """The inputs do not satisfy the premise required by a verifier."""


class ConfigError(IrcwError, ValueError):
    """A scenario file or command-line configuration is invalid."""
