"""Exception types shared across the package."""


class HardyLabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HardyLabError, ValueError):
    """Evaluation or construction outside the domain of an expression."""


class InconclusiveError(HardyLabError):
    """A growth comparison needed for a decision came back Inconclusive."""

    def __init__(self, message, comparison=None):
        super().__init__(message)
        self.comparison = comparison


class NotPolynomialGrowth(HardyLabError):
    pass


class NormalFormError(HardyLabError):
    pass


class IrrationalityUndecided(HardyLabError):
    pass


class NoWindowFound(HardyLabError):
    pass


class ParseError(HardyLabError):
    def __init__(self, message, offset: int, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        exp = ", ".join(self.expected)
        super().__init__(f"{message} at byte {offset}" + (f" (expected one of: {exp})" if exp else ""))


# petlab
class NotNice(HardyLabError):
    pass


class NotEssentiallyDistinct(HardyLabError):
    pass


class EmptyFamily(HardyLabError):
    pass


class FormViolation(HardyLabError):
    pass


class NonTermination(HardyLabError):
    pass


class VerificationFailure(HardyLabError):
    def __init__(self, item: str, message: str, witnesses=()):
        self.item = item
        self.witnesses = tuple(witnesses)
        super().__init__(f"item {item}: {message}")


# ergolab
class PrecisionExhausted(HardyLabError):
    def __init__(self, message, n=None):
        self.n = n
        super().__init__(message)


class ComplexityRefusal(HardyLabError):
    pass


class NotErgodic(HardyLabError):
    pass


class UnsupportedSystem(HardyLabError):
    pass


class ScheduleTooSmall(UserWarning):
    """Halving the averaging lengths moved a seminorm estimate by more than 10%."""
