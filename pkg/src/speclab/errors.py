"""Exception hierarchy shared by all speclab modules."""


class SpecLabError(Exception):
    """Base class for every error raised by speclab."""


class InvalidParameterError(SpecLabError, ValueError):
    pass


class GeometryError(SpecLabError):
    pass


class ResolutionError(GeometryError):
    pass


class DeformationError(GeometryError):
    """Raised when a transported or interpolated mesh inverts; remeshing is advised."""


class IncompatibleMeshError(GeometryError):
    pass


class PointOutsideError(GeometryError):
    pass


class ConvergenceError(SpecLabError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PreconditionError(SpecLabError):
    pass


class SimplicityError(SpecLabError):
    """The requested eigenvalue belongs to a degenerate cluster."""


class PairingError(SpecLabError):
    """Mode pairing along a path is ambiguous; refine the t grid."""


class ValidityError(SpecLabError):
    pass


class BudgetError(SpecLabError):
    pass


class NumericalError(SpecLabError):
    pass
