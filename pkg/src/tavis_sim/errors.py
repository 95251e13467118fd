"""Exception types shared across the package."""


class TavisSimError(Exception):
    """Base class for all package-specific errors."""


class TruncationError(TavisSimError):
    """The Fock-space cutoff is too small for the requested computation.

    Raised when a coherent state's Poisson tail beyond the cutoff is too
    heavy, when evolution would populate truncation-boundary blocks, or when
    a phase-space grid point is not representable at the current cutoff.
    """


class DimensionCapError(TavisSimError):
    """A dense-matrix construction would exceed the configured dimension cap."""
