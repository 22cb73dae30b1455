"""Exception types shared across the library."""


class LamlabError(Exception):
    """Base class for all library-specific errors."""


class NotSquareError(LamlabError):
    """Operation requires a 2x2 matrix but received a wider one."""


class SingularMatrixError(LamlabError):
    """A matrix that must be invertible is singular within tolerance."""


class DomainError(LamlabError):
    """An evaluation point lies outside a function's guarded domain."""


class NotSupportedError(LamlabError):
    """A measure has atoms outside the subspace an operation requires."""


class CertificateMismatchError(LamlabError):
    """A certificate does not verify or does not match the claimed measure."""


class ZeroFieldError(LamlabError):
    """A nonzero grid field is required."""


class ShapeError(LamlabError):
    """Grid fields have inconsistent levels or forbidden coefficient support."""
