"""Exception hierarchy shared by every module."""


class LocmarkError(Exception):
    pass


class DimensionError(LocmarkError, ValueError):
    pass


class StructureError(LocmarkError, ValueError):
    pass


class DomainError(LocmarkError, ValueError):
    pass


class NumericError(LocmarkError, ArithmeticError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CapacityError(LocmarkError):
    pass


class CertificateError(LocmarkError):
    pass


class ScenarioError(LocmarkError, ValueError):
    """Schema violation in a scenario document; ``path`` is a JSON path."""

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
