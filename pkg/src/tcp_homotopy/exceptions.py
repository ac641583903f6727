"""Exception types raised by the solver."""


class TcpError(Exception):
    """Base class for solver errors."""


class ShapeError(TcpError, ValueError):
    """Array shapes do not match the problem dimension."""


class ParameterError(TcpError, ValueError):
    """Invalid homotopy parameters or tracer settings."""


class UnsupportedSizeError(TcpError, ValueError):
    """Problem is too large for the requested operation."""


class ProblemFileError(TcpError, ValueError):
    """Problem file could not be parsed or validated.

    Attributes:
        details: One human-readable entry per failing field or line.
    """

    def __init__(self, message: str, details: list[str] | None = None) -> None:
        super().__init__(message)
        self.details = details or []

    def __str__(self) -> str:
        if not self.details:
            return super().__str__()
        return "\n".join([super().__str__(), *(f"  {d}" for d in self.details)])


class PredictorError(TcpError):
    """Tangent system is singular or ill-conditioned."""
