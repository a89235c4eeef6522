"""Exception types shared across the package."""


class RKError(Exception):
    """Base class for all errors raised by rkcond."""


class DomainError(RKError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class SingularResolvent(RKError):
    """``lambda*I - T`` is numerically singular, i.e. lambda is (close to) an eigenvalue."""

    def __init__(self, lam, sigma_min=None, sigma_max=None):
        self.lam = complex(lam)
        self.sigma_min = sigma_min
        self.sigma_max = sigma_max
        msg = f"lambda = {self.lam!r} is numerically in the spectrum"
        if sigma_min is not None:
            msg += f" (sigma_min={sigma_min:.3e}, sigma_max={sigma_max:.3e})"
        super().__init__(msg)


class OverflowGuard(RKError):
    """A norm sequence exceeded the overflow ceiling; ``partial`` holds what was computed."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InsufficientData(RKError):
    pass


class InfeasibleGeometry(RKError):
    pass
