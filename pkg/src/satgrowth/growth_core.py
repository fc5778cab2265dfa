"""Generalized logistic growth law and its closed-form solution.

The model is the rate law

    dphi/dt = lam * phi * (1 - eta * phi**alpha)

whose integral solution, for alpha != 0, is

    phi(t) = (eta + c**(-alpha) * exp(-alpha * lam * t)) ** (-1 / alpha)

with integration constant ``c``. Time is measured in years from
``SolutionSpec.t_origin``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError

__all__ = [
    "GrowthParams",
    "SolutionSpec",
    "SaturationReport",
    "growth_rate",
    "closed_form",
    "bracket_terms",
    "constant_from_initial",
    "saturation_value",
    "nonlinear_timescale",
    "saturation_report",
]


def _is_odd_integer(x: float) -> bool:
    return float(x).is_integer() and int(x) % 2 != 0


def _scalar_or_array(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class GrowthParams:
    """Parameters ``(alpha, lam, eta)`` of one logistic variable.

    ``alpha`` is the saturation exponent, ``lam`` the linear growth rate
    in 1/year and ``eta`` the nonlinearity tuning parameter. ``eta = 0``
    is allowed and gives pure exponential growth.
    """

    alpha: float
    lam: float
    eta: float

    def __post_init__(self):
        for name in ("alpha", "lam", "eta"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite real, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.alpha == 0.0:
            raise DomainError("alpha must be nonzero; the closed form is undefined at alpha = 0")
        if self.eta < 0.0:
            raise DomainError(f"eta must be >= 0, got {self.eta}")
        if self.alpha < 0.0:
            warnings.warn(
                "negative alpha: eta**(-1/alpha) is no longer an upper ceiling",
                RuntimeWarning,
                stacklevel=3,
            )

    @property
    def bounded(self) -> bool:
        return self.eta > 0.0


@dataclass(frozen=True)
class SolutionSpec:
    """A particular solution: parameters plus integration constant.

    ``c`` is normally positive. A negative ``c`` is accepted only for odd
    integer ``alpha``, where it encodes a trajectory decaying toward the
    ceiling from above (``c**(-alpha) < 0``). ``c = inf`` is the degenerate
    constant trajectory sitting exactly at saturation.
    """

    params: GrowthParams
    c: float
    t_origin: float = 0.0

    def __post_init__(self):
        c = float(self.c)
        if math.isnan(c) or c == 0.0 or c == -math.inf:
            raise DomainError(f"integration constant must be nonzero, got {self.c!r}")
        if c < 0.0 and not _is_odd_integer(self.params.alpha):
            raise DomainError("negative c is only real-valued for odd integer alpha")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "t_origin", float(self.t_origin))

    @property
    def transient_coefficient(self) -> float:
        """The signed factor ``c**(-alpha)`` multiplying the decaying exponential."""
        if math.isinf(self.c):
            return 0.0
        a = self.params.alpha
        if self.c > 0.0:
            return self.c ** (-a)
        return -((-self.c) ** (-a))


@dataclass(frozen=True)
class SaturationReport:
    """Ceiling and onset time; ``phi_sat = inf`` marks unbounded growth and
    ``t_nl = None`` marks an undefined timescale."""

    phi_sat: float
    t_nl: Optional[float]

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.phi_sat)


def growth_rate(params: GrowthParams, phi):
    """Evaluate ``lam * phi * (1 - eta * phi**alpha)`` (scalar or array)."""
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)):
        raise DomainError("phi must be finite")
    if np.any(phi < 0.0) and not float(params.alpha).is_integer():
        raise DomainError("negative phi with non-integer alpha has no real power")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = params.lam * phi * (1.0 - params.eta * phi ** params.alpha)
    # phi = 0 is a fixed point for any alpha (0**negative would give nan)
    return _scalar_or_array(np.where(phi == 0.0, 0.0, out))


def bracket_terms(spec: SolutionSpec, t):
    """Return the two summands ``(eta, c**(-alpha) * exp(-alpha*lam*t))`` of the
    closed-form bracket. Their equality defines the nonlinear timescale."""
    p = spec.params
    t = np.asarray(t, dtype=float)
    transient = spec.transient_coefficient * np.exp(-p.alpha * p.lam * t)
    return _scalar_or_array(np.full_like(t, p.eta)), _scalar_or_array(transient)


def closed_form(spec: SolutionSpec, t):
    """Evaluate the integral solution at ``t`` years (scalar or array)."""
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t) | np.isposinf(t)):
        raise DomainError("t must be finite")
    p = spec.params
    with np.errstate(over="ignore"):
        transient = spec.transient_coefficient * np.exp(-p.alpha * p.lam * t)
    bracket = p.eta + transient
    bad = ~(bracket > 0.0)
    if np.any(bad):
        i = int(np.flatnonzero(bad.ravel())[0])
        ti = float(t.ravel()[i]) if t.ndim else float(t)
        raise DomainError(
            f"closed-form bracket is non-positive at t={ti}: eta={p.eta}, "
            f"c**(-alpha)*exp(-alpha*lam*t)={float(np.ravel(transient)[i])}"
        )
    return _scalar_or_array(bracket ** (-1.0 / p.alpha))


def constant_from_initial(params: GrowthParams, phi0: float, t0: float = 0.0) -> float:
    """Integration constant ``c`` for which the solution passes through ``(t0, phi0)``.

    Returns ``inf`` when ``phi0`` sits exactly at the ceiling.
    """
    phi0 = float(phi0)
    if not math.isfinite(phi0) or phi0 <= 0.0:
        raise DomainError(f"phi0 must be a positive finite value, got {phi0}")
    a = params.alpha
    gap = phi0 ** (-a) - params.eta
    if gap == 0.0:
        return math.inf
    # c**(-alpha) = gap * exp(alpha*lam*t0), kept in log form against overflow
    log_mag = math.log(abs(gap)) + a * params.lam * float(t0)
    c_mag = math.exp(-log_mag / a)
    if gap > 0.0:
        return c_mag
    if _is_odd_integer(a):
        return -c_mag
    raise DomainError(
        f"phi0={phi0} lies beyond the ceiling and alpha={a} is not an odd integer; "
        "no real integration constant exists"
    )


def saturation_value(params: GrowthParams) -> float:
    """Ceiling ``eta**(-1/alpha)``; ``inf`` when ``eta = 0``."""
    if params.eta == 0.0:
        return math.inf
    return params.eta ** (-1.0 / params.alpha)


def nonlinear_timescale(spec: SolutionSpec) -> Optional[float]:
    """Time at which both bracket terms of the closed form are equal.

    Returns ``None`` when ``eta = 0`` (saturation never sets in).
    """
    p = spec.params
    if p.eta == 0.0:
        return None
    if p.lam == 0.0:
        raise DomainError("lam = 0 gives no timescale")
    if math.isinf(spec.c):
        raise DomainError("c is infinite: the trajectory is already saturated")
    log_term = math.log(p.eta) + p.alpha * math.log(abs(spec.c))
    return -log_term / (p.alpha * p.lam)


def saturation_report(spec: SolutionSpec) -> SaturationReport:
    return SaturationReport(
        phi_sat=saturation_value(spec.params),
        t_nl=nonlinear_timescale(spec),
    )
