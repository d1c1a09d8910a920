"""Exception types raised across the package."""


class QactionError(Exception):
    """Base class for all package errors."""


class BasisMismatchError(QactionError, ValueError):
    """Two states or a state and an operator live on different bases."""


class NotHermitianError(QactionError, ValueError):
    pass


class DimensionCapError(QactionError, ValueError):
    """Dense evolution requested above the configured dimension cap."""


class StaticSpecRequiredError(QactionError, TypeError):
    """Operation needs a time-independent Hamiltonian."""


class DrivenSpecRequiredError(QactionError, TypeError):
    pass


class StepResolutionError(QactionError, ValueError):
    """Driven step size does not resolve the fastest dynamical scale."""


class DegenerateSpectrumError(QactionError, ValueError):
    pass


class NumericalContractError(QactionError):
    """A numerical post-condition (norm drift, peak threshold) was violated."""


class InvalidTraceError(NumericalContractError):
    pass


class NoFlipError(NumericalContractError):
    """No point in the search window reached the peak threshold."""

    def __init__(self, observed_max: float, message: str | None = None):
        self.observed_max = float(observed_max)
        super().__init__(
            message or f"no flip: maximum observed probability {self.observed_max:.6g} below threshold"
        )


class UnknownModelError(QactionError, KeyError):
    pass


class ConfigError(QactionError, ValueError):
    """Experiment configuration failed to parse or validate."""
