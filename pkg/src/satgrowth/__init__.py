"""Saturating growth with a generalized logistic law.

Calibration of the closed-form solution to time series, saturation
ceilings and onset timescales, Runge-Kutta integration, linear stability of
the two-variable revenue/headcount system and its power-law reduction.
"""
__version__ = "0.1.0"

from .errors import DataError, DomainError, FitError, IntegrationError, SatGrowthError
from .growth_core import (
    GrowthParams,
    SaturationReport,
    SolutionSpec,
    bracket_terms,
    closed_form,
    constant_from_initial,
    growth_rate,
    nonlinear_timescale,
    saturation_report,
    saturation_value,
)
from .integrator import AutonomousSystem, Trajectory, integrate
from .calibration import (
    FitResult,
    LineFit,
    TimeSeries,
    cumulative,
    fit_logistic,
    initial_guess,
    loglog_slope,
)
from .phase_dynamics import (
    CoupledLogisticSystem,
    JacobianCoeffs,
    PowerLawPoint,
    StabilityReport,
    beta_theoretical,
    classify_equilibrium,
    eigenvalues,
    equilibrium,
    jacobian,
    linearized_flow,
    power_law_fit,
    power_law_transform,
    stability_report,
)
