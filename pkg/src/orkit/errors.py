"""Exception types shared across the package.

Every error raised by orkit derives from OrkitError, so callers can catch
one base class.  The CLI maps these onto exit codes: bad input (ValueError
family) exits 2, resource limits exit 3, failed verifications exit 1.
"""


class OrkitError(Exception):
    """Base class for all orkit errors."""


class NotPrimeError(OrkitError, ValueError):
    """A parameter that must be prime (or an odd prime) is not."""


class FieldOrderError(OrkitError, ValueError):
    """Requested field order or construction size is out of the supported range."""


class DimensionMismatchError(OrkitError, ValueError):
    """Operands have incompatible shapes."""


class NonSquareError(OrkitError, ValueError):
    """A square matrix is required."""


class FormatError(OrkitError, ValueError):
    """A file or text payload does not match the expected format."""


class TooLargeError(OrkitError, RuntimeError):
    """Materializing the requested object would exceed a hard size cap."""


class CountOverflowError(OrkitError, OverflowError):
    """A counter left the 64-bit signed range."""


class BudgetExceededError(OrkitError, RuntimeError):
    """A search exhausted its work budget before finishing."""

    def __init__(self, budget, message=None):
        self.budget = budget
        super().__init__(message or f"search budget of {budget} exhausted")


class NotKFreeError(OrkitError, ValueError):
    """A matrix required to be k-free contains a k-rectangle.

    The offending all-ones submatrix is attached as ``witness``.
    """

    def __init__(self, k, witness):
        self.k = k
        self.witness = witness
        super().__init__(
            f"matrix is not {k}-free: rows {witness.rows} x cols {witness.cols}"
        )


class NoFreeDeltaError(OrkitError, RuntimeError):
    """No admissible residue passed the freeness check during construction."""
