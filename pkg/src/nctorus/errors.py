"""Exception types shared across the package."""

__all__ = [
    "TruncationError",
    "UnsupportedConventionError",
    "DegenerateDeformationError",
    "ConventionMismatchError",
]


class TruncationError(ArithmeticError):
    """A certified series truncation cannot meet the requested tail bound
    within the configured term cap.

    Attributes
    ----------
    required : int
        Number of terms the certificate would need.
    cap : int
        The configured ``max_terms`` ceiling.
    bound : float
        The tail bound achieved at the cap.
    """

    def __init__(self, message, required=None, cap=None, bound=None):
        super().__init__(message)
        self.required = required
        self.cap = cap
        self.bound = bound


class UnsupportedConventionError(ValueError):
    """The requested operation is only defined under a convention the
    input does not satisfy (e.g. T-transform phases at odd level)."""


class DegenerateDeformationError(ValueError):
    """Deformation parameter satisfies q**2 == 1, so the q-deformed
    generators are not defined (division by q - 1/q)."""


class ConventionMismatchError(RuntimeError):
    """A measured pointwise ratio that should be a constant phase has a
    spread beyond tolerance, indicating an index-convention mismatch."""
