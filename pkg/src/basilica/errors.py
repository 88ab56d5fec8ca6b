"""Error categories shared by every module; the CLI maps each to an exit code."""


class BasilicaError(Exception):
    exit_code = 1


class InputError(BasilicaError, ValueError):
    exit_code = 3


class DomainError(InputError):
    """Mathematically excluded input, e.g. a root point in {0, -1}."""


class ResourceError(BasilicaError):
    exit_code = 4

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PrecisionError(BasilicaError):
    exit_code = 5
