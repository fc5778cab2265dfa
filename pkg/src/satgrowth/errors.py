"""Exception types raised across the package."""


class SatGrowthError(Exception):
    """Base class for all package errors."""


class DomainError(SatGrowthError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class IntegrationError(SatGrowthError, RuntimeError):
    """Numerical integration could not continue.

    ``t`` holds the time at which the failure was detected, when known.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class FitError(SatGrowthError, RuntimeError):
    """Least-squares calibration failed.

    ``diagnostics`` carries whatever partial information the optimizer had.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DataError(SatGrowthError, ValueError):
    """Malformed or inconsistent input data (CSV rows, series layouts)."""
