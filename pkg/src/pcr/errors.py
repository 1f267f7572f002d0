"""Exception hierarchy shared by every module of the package."""

from typing import Optional


class PCRError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PCRError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class ValidationError(PCRError):
    def __init__(self, message: str, element: Optional[str] = None):
        super().__init__(message)
        self.element = element


class NotFoundError(PCRError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "not found"


class DimensionError(PCRError, ValueError):
    pass


class EmptyCorpusError(PCRError, ValueError):
    pass


class EmptyInputError(PCRError, ValueError):
    pass


class ConfigError(PCRError, ValueError):
    pass


class ProviderError(PCRError):
    def __init__(self, message: str, retryable: bool = False):
        super().__init__(message)
        self.retryable = retryable


class DegenerateVarianceError(PCRError, ArithmeticError):
    """Paired differences have zero variance, so t and d are undefined."""

    def __init__(self, mean_diff: float):
        super().__init__(f"paired differences have zero variance (mean diff {mean_diff:.4f})")
        self.mean_diff = mean_diff
