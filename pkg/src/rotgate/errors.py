"""Exception and warning types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class OutOfRangeError(ValidationError):
    """Quantum number, time or index outside the valid range."""


class NumericalError(RuntimeError):
    """Propagation lost unitarity or failed to converge."""


class OverlapWarning(UserWarning):
    pass


class TruncationWarning(UserWarning):
    pass


class UndersamplingWarning(UserWarning):
    pass


class OffGridWarning(UserWarning):
    pass
