"""Exception hierarchy shared by all subshear modules."""


class SubshearError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SubshearError):
    """A point lies outside the admissible domain of a chart or metric."""


class SignatureError(SubshearError):
    """A metric or frame has the wrong signature for the requested operation."""


class SingularMetricError(SubshearError):
    """The metric is numerically singular (condition number too large)."""


class DimensionMismatch(SubshearError):
    """Operands have incompatible dimensions."""


class NotSpacelikeError(SubshearError):
    """The induced metric fails to be positive definite."""


class DegenerateFrameError(SubshearError):
    """Coordinate tangents are linearly dependent; no frame can be built."""


class DegenerateNormalError(SubshearError):
    """The metric restricted to the normal plane is singular."""


class NotNormalError(SubshearError):
    """A vector expected to be normal has a tangential component."""


class ZeroVectorError(SubshearError):
    """A vector that must be non-zero has negligible components."""


class NoDirectionError(SubshearError):
    """No umbilical direction exists at this point."""


class NotCommutingError(SubshearError):
    """Shape operators do not commute; no simultaneous eigenbasis."""


class NoRootError(SubshearError):
    """No root of the residual was found in the given bracket."""


class ConfigError(SubshearError):
    """A scan configuration is invalid."""
