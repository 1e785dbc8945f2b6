"""Exception types shared across the package."""


class EulerRomError(Exception):
    """Base class for all package errors."""


class InadmissibleStateError(EulerRomError, ValueError):
    """A state violates positivity of density or pressure."""


class ConfigurationError(EulerRomError, ValueError):
    """A problem / plan / file configuration is invalid."""


class PairingError(ConfigurationError):
    """A ROM formulation was combined with an incompatible basis or weight."""


class UnstableFomError(EulerRomError, RuntimeError):
    """The full-order model produced a non-finite state."""


class RankError(EulerRomError, ValueError):
    """Requested more POD modes than the data supports."""


class FormatError(EulerRomError, ValueError):
    """A binary or text artifact does not match its declared schema."""
