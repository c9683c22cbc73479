"""Exception hierarchy shared by every wcport module."""


class WcportError(Exception):
    """Base class; the CLI turns these into exit status 1."""


class DomainError(WcportError, ValueError):
    pass


class ValidationError(WcportError, ValueError):
    pass


class ConfigError(WcportError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")


class SolverError(WcportError, RuntimeError):
    pass


class VerificationError(WcportError):
    pass
