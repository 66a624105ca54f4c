"""Exception types raised by the chain library."""


class ChainError(Exception):
    """Base class for all library errors."""


class DimensionBudgetError(ChainError, ValueError):
    """N**L exceeds the configured Hilbert-space dimension cap."""


class SymmetryViolation(ChainError, RuntimeError):
    """An operator failed to preserve a symmetry sector it must preserve."""


class CertificationError(ChainError, RuntimeError):
    """An eigenvector failed its H or T residual check."""


class DiagonalizationError(ChainError, RuntimeError):
    """The dense eigensolver did not converge or broke its residual contract."""
