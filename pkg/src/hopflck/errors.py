"""Exception hierarchy shared by the geometry modules and the CLI."""


class HopfError(Exception):
    """Base class for all errors raised by hopflck."""


class DegenerateEquation(HopfError):
    """Both coefficients of the monotone equation vanish."""


class BlowUp(HopfError):
    """The potential ODE left the admissible range for L'."""

    def __init__(self, message, trajectory=None, at=None):
        super().__init__(message)
        self.trajectory = trajectory
        self.at = at


class ParameterError(HopfError):
    """Hopf parameters violate |alpha| >= |beta| > 1 or are malformed."""


class InconsistentExactData(ParameterError):
    """Exact rational data disagrees with the floating (alpha, beta)."""


class ParamMismatch(ParameterError):
    """Operation requires |alpha| == |beta|."""


class SingularBasis(HopfError):
    """The real basis (e2, Je2, e3, Je3) is numerically singular."""


class IllConditioned(HopfError):
    """Gram matrix of the frame is too badly conditioned for the Koszul solve."""


class NonPositiveH(HopfError):
    """A periodic function meant to be positive is not."""


class NotElliptic(HopfError):
    """No integers m, n with alpha^m == beta^n (or none can be certified)."""


class InexactClassification(HopfError):
    """A verdict depends on floating-point rational recognition."""


class PoleExcluded(HopfError):
    """Stereographic projection evaluated at the north pole."""
