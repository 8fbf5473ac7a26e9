"""Exception types shared across the package."""


class ShapeMismatchError(ValueError):
    """Operands act on different site counts."""


class SiteCapError(RuntimeError):
    """Dense realization requested beyond the configured site cap."""


class LatticeDomainError(ValueError):
    """Lattice parameters outside the supported ring geometry."""


class LevelCrossingError(ArithmeticError):
    """Two-level counterdiabatic formula hit |h| = 0."""


class StepSizeError(ValueError):
    """Propagation step violates the stability rule dt * ||H|| < 0.5."""


class NormDriftError(RuntimeError):
    """State norm drifted beyond the abort threshold during propagation."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class StabilizerDimensionError(RuntimeError):
    """Stabilizer solve did not yield a one-dimensional space."""

    def __init__(self, dimension):
        super().__init__(f"stabilizer constraints fix a {dimension}-dimensional space, expected 1")
        self.dimension = dimension


class BdgCalibrationError(RuntimeError):
    """Free-fermion sector prediction could not be matched to the exact spectrum."""
