"""Exception hierarchy.  Each family maps to one CLI exit code."""


class NceigError(Exception):
    exit_code = 1


class ConfigError(NceigError, ValueError):
    """Invalid sizes, intervals, orders or option combinations."""

    exit_code = 2


class KernelError(NceigError):
    exit_code = 3


class KernelSyntaxError(KernelError, ValueError):
    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(KernelSyntaxError):
    pass


class KernelEvaluationError(KernelError, ArithmeticError):
    """Kernel produced a non-finite value at (x, u)."""

    def __init__(self, x: float, u: float, value: float, source: str = ""):
        self.x = x
        self.u = u
        self.value = value
        self.source = source
        where = f" for kernel {source!r}" if source else ""
        super().__init__(f"non-finite kernel value {value!r} at x={x!r}, u={u!r}{where}")


class EigenConvergenceError(NceigError, ArithmeticError):
    exit_code = 4

    def __init__(self, message: str, sweeps: int = 0, found: int = 0, size: int = 0):
        self.sweeps = sweeps
        self.found = found
        self.size = size
        super().__init__(f"{message} (sweeps={sweeps}, converged {found} of {size})")


class TrackingLossError(NceigError):
    exit_code = 5
