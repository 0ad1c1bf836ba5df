"""Exception hierarchy shared by the numerics and the command line.

Every error carries a human-readable ``detail`` and the process exit code
the CLI reports when the error escapes a command.
"""

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class IpVerifyError(Exception):
    exit_code: int = EXIT_FAILED

    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail


class ConfigError(IpVerifyError):
    exit_code = EXIT_USAGE


class DomainError(IpVerifyError, ValueError):
    exit_code = EXIT_USAGE


class UnsupportedKindError(DomainError):
    pass


class EmptyBatchError(DomainError):
    pass


class ConvergenceError(IpVerifyError, ArithmeticError):
    pass


class SingularSystemError(IpVerifyError, ArithmeticError):
    pass
