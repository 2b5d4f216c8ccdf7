"""Exception types raised across the package."""


class SingletPathsError(Exception):
    """Base class for package-specific errors."""


class DimensionMismatchError(SingletPathsError, ValueError):
    """Operands live in Hilbert spaces of incompatible dimensions."""


class SingularBasisError(SingletPathsError):
    """The expansion columns are numerically linearly dependent."""


class DegenerateCscoError(SingletPathsError):
    """The requested measurement directions do not form a complete commuting pair."""


class OrthogonalPostselectionError(SingletPathsError):
    """Post-selection state has vanishing overlap with the pre-selected state."""


class ZeroProbabilityPathError(SingletPathsError):
    """A path with zero Born probability makes conditional values undefined."""


class SingularToyModelError(SingletPathsError):
    """Column averages are constant while row averages differ; no solution exists."""


class SingularAngleError(SingletPathsError):
    """Hidden polarization component undefined where sin(omega) vanishes."""


class InsufficientSamplesError(SingletPathsError):
    """A Monte Carlo estimate was requested over a cell with no samples."""


class ImpossibleOutcomeError(SingletPathsError):
    """Conditioning on an outcome whose total probability is zero."""
