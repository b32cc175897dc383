"""Exception types shared across the package."""


class PdmsiError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(PdmsiError, ValueError):
    """Operands have incompatible dimensions."""


class NonHermitian(PdmsiError, ValueError):
    """Matrix violates Hermitian symmetry beyond tolerance."""


class InvalidP(PdmsiError, ValueError):
    """Schatten norm order must be a finite real >= 1."""


class IncompleteTable(PdmsiError, ValueError):
    """Correlator table is missing entries needed for the request."""

    def __init__(self, missing):
        self.missing = list(missing)
        shown = ", ".join(f"({a},{b})" for a, b in self.missing[:6])
        more = "" if len(self.missing) <= 6 else f" and {len(self.missing) - 6} more"
        super().__init__(f"correlator table is missing pairs: {shown}{more}")


class NotSpatiallyIncompatible(PdmsiError, ValueError):
    """PDM has no negative eigenvalue, so no witness exists."""


class NoAsymmetricColumn(PdmsiError, ValueError):
    """Stochastic matrix columns i and j coincide; no coherent input can expose SI."""


class ZeroShots(PdmsiError, ValueError):
    """Sampling requires a positive shot count."""
