"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Invalid user-supplied parameter (grid size, model parameter, bandwidth...)."""


class RealnessViolation(ArithmeticError):
    """DFT of a block row carries imaginary content: the input is not block circulant."""


class IndefiniteBlocks(ArithmeticError):
    """A spectral block has a clearly negative eigenvalue (invalid covariance model)."""


class NotPositiveDefinite(ArithmeticError):
    """Triangular factorization requested on a singular or indefinite matrix."""


class CapExceeded(MemoryError):
    """A dense computation was refused because it would exceed the configured cap."""


class FieldFormatError(ValueError):
    """Malformed binary field file."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
