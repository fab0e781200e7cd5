from typing import Optional


class DesyncError(Exception):
    """Base class for every error raised by desync_lab.

    ``exit_code`` is what the command line returns when the error escapes.
    """

    exit_code = 2

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class DomainError(DesyncError, ValueError):
    """A precondition on n, T, parity or an index was violated."""


class ConfigError(DesyncError):
    """Inconsistent simulation config, topology or perception."""


class UnsupportedSizeError(DesyncError):
    """The analytic builder has no closed form for this n."""


class DegenerateStateError(DesyncError):
    """Duplicate phases or a non-positive gap."""

    exit_code = 3


class OvershootError(DesyncError):
    """A step drove a gap to zero or below."""

    exit_code = 3

    def __init__(self, message: str, index: Optional[int] = None, value: Optional[float] = None):
        super().__init__(message)
        self.index = index
        self.value = value


class NumericalError(DesyncError):
    """Eigen-solve failure or residual check failure."""

    exit_code = 3

    def __init__(self, message: str, provenance: Optional[str] = None):
        if provenance:
            message = f"{message} (matrix provenance: {provenance})"
        super().__init__(message)
        self.provenance = provenance


class ProbeError(DesyncError):
    """The map raised while probing one column of a finite-difference Jacobian."""

    exit_code = 3

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (probe column {column})")
        self.column = column


class StorageError(DesyncError):
    """Reading a topology or writing an export failed."""

    exit_code = 4

    def __init__(self, message: str, path: Optional[str] = None):
        if path:
            message = f"{message}: {path}"
        super().__init__(message)
        self.path = path
