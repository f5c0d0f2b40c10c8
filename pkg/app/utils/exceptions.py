from typing import Optional


class BalancedLoadsError(Exception):
    """Base class for every error raised by the toolkit."""


class GraphFormatError(BalancedLoadsError):
    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{prefix}{message}")


class NotATreeError(BalancedLoadsError):
    pass


class ConvergenceError(BalancedLoadsError):
    def __init__(self, message: str, residual: float, sweeps: int):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(f"{message} (residual={residual:.3e} after {sweeps} sweeps)")


class SpecError(BalancedLoadsError):
    """A model or distribution spec string could not be parsed."""


class BoundError(BalancedLoadsError):
    pass


class InputTooLargeError(BalancedLoadsError):
    pass
