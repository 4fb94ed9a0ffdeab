"""Exception hierarchy shared by all linegeom modules."""


class GeometryError(Exception):
    """Base class for numerical failures in the geometry pipeline."""


class DegenerateStepError(GeometryError):
    """Finite-difference step collapsed below the representable resolution."""


class OutOfDomainError(GeometryError):
    """A stencil point left the declared domain of a scalar field."""


class SingularConfigurationError(GeometryError):
    """The metric is degenerate where a hard value was required."""

    def __init__(self, message, det=None):
        super().__init__(message)
        self.det = det


class SingularInputError(ValueError):
    """Component parameters sit on a pole of the effective power."""


class SingularTransformError(ValueError):
    """The component/impedance basis change is not invertible (C = 0)."""


class CaseFileError(ValueError):
    """Malformed or invalid network case file."""

    def __init__(self, message, path=None, line=None, column=None):
        where = []
        if path:
            where.append(path)
        if line is not None:
            where.append(f"line {line}, column {column}")
        super().__init__(f"{message} ({'; '.join(where)})" if where else message)
        self.path = path
        self.line = line
        self.column = column
