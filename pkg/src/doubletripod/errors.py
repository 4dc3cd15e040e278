"""Exception types shared across the package."""


class DoubleTripodError(Exception):
    """Base class for all errors raised by this package."""


class OrthogonalityViolation(DoubleTripodError):
    """Laser phases do not make the two bright states orthogonal."""


class DegenerateCoupling(DoubleTripodError):
    """Zero total Rabi coupling; the dressed basis is undefined."""


class InvalidKappa(DoubleTripodError, ValueError):
    """Wave-vector magnitude must be strictly positive."""


class StepTooSmall(DoubleTripodError):
    """Finite-difference step below the round-off floor."""


class PotentialPresent(DoubleTripodError):
    """Momentum-space operation requested while an external potential is set."""


class GridTooCoarse(DoubleTripodError):
    """Sampling grid too coarse to resolve the requested feature."""


class UnstableStep(DoubleTripodError):
    """Time step too large for the spectral range of the Hamiltonian."""


class PacketTooNarrow(DoubleTripodError):
    """Wavepacket width below the resolvable limit of the grid."""


class PacketTouchesBoundary(DoubleTripodError):
    """Wavepacket tails exceed tolerance at the box boundary."""


class ConfigError(DoubleTripodError):
    """Malformed or unknown keys in a run configuration."""
