"""Exception hierarchy shared by the symbolic and numeric halves."""
from typing import Optional


class StencilError(Exception):
    """Base class for every error raised by this package."""


class WindowOverflowError(StencilError):
    def __init__(self, k: int, l: int, window: int):
        self.offset = (k, l)
        self.window = window
        super().__init__(f"grid offset U[{k},{l}] leaves the stencil window |k|,|l| <= {window}")


class AnsatzError(StencilError):
    """Ansatz basis elements are not linearly independent."""


class InfeasibleError(StencilError):
    """A linear solve has no solution at the requested bounds."""


class InconsistentSchemeError(StencilError):
    def __init__(self, message: str, terms: Optional[object] = None):
        self.terms = terms
        super().__init__(message)


class UnknownSchemeError(StencilError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown scheme"


class SolverError(StencilError):
    pass


class DimensionError(SolverError):
    pass


class SingularSystemError(SolverError):
    pass


class NonFiniteStateError(SolverError):
    pass


class AuditError(StencilError):
    pass


class ConfigError(StencilError):
    pass
