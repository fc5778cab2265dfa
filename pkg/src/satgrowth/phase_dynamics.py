"""Two-variable revenue/headcount growth system and its terminal state.

Revenue ``R`` and headcount ``H`` each follow their own generalized logistic
law. The module finds the nontrivial equilibrium, linearizes about it,
classifies it from the 2x2 stability matrix, evolves small perturbations
under the linear flow and maps trajectories onto the ``(u, v)`` plane where
the two logistic laws combine into ``v = kappa * u**beta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .calibration import LineFit, loglog_slope
from .errors import DomainError
from .growth_core import GrowthParams, growth_rate, saturation_value
from .integrator import AutonomousSystem

__all__ = [
    "CoupledLogisticSystem",
    "JacobianCoeffs",
    "StabilityReport",
    "PowerLawPoint",
    "STABLE_NODE",
    "UNSTABLE_NODE",
    "SADDLE",
    "STABLE_FOCUS",
    "UNSTABLE_FOCUS",
    "CENTER",
    "DEGENERATE",
    "equilibrium",
    "jacobian",
    "eigenvalues",
    "classify_equilibrium",
    "stability_report",
    "linearized_flow",
    "power_law_transform",
    "power_law_fit",
    "beta_theoretical",
    "log_kappa_theoretical",
]

STABLE_NODE = "stable node"
UNSTABLE_NODE = "unstable node"
SADDLE = "saddle"
STABLE_FOCUS = "stable focus"
UNSTABLE_FOCUS = "unstable focus"
CENTER = "center"
DEGENERATE = "degenerate"

CLASSIFICATIONS = (STABLE_NODE, UNSTABLE_NODE, SADDLE, STABLE_FOCUS, UNSTABLE_FOCUS, CENTER, DEGENERATE)

_CLASSIFY_TOL = 1e-12


def _partial(params: GrowthParams, x: float) -> float:
    # d/dx [lam*x*(1 - eta*x**alpha)] = lam*(1 - (1+alpha)*eta*x**alpha)
    if x == 0.0:
        return params.lam if params.alpha > 0 else math.nan
    return params.lam * (1.0 - (1.0 + params.alpha) * params.eta * x**params.alpha)


@dataclass(frozen=True)
class CoupledLogisticSystem:
    """Revenue ``R`` and headcount ``H`` with rates ``(rho, sigma)``.

    Only the uncoupled ansatz is implemented: ``rho`` depends on ``R``
    alone and ``sigma`` on ``H`` alone. Subclasses adding cross terms
    override :meth:`rates` and :meth:`partials`.
    """

    r_params: GrowthParams
    h_params: GrowthParams

    def rates(self, R, H):
        return growth_rate(self.r_params, R), growth_rate(self.h_params, H)

    def partials(self, R: float, H: float):
        """``(drho/dR, drho/dH, dsigma/dR, dsigma/dH)`` at ``(R, H)``."""
        return _partial(self.r_params, R), 0.0, 0.0, _partial(self.h_params, H)

    def in_domain(self, state) -> bool:
        R, H = state
        for x, p in ((R, self.r_params), (H, self.h_params)):
            if x < 0.0 and not float(p.alpha).is_integer():
                return False
        return True

    def as_autonomous(self) -> AutonomousSystem:
        def rate(state):
            r, h = self.rates(state[0], state[1])
            return np.array([r, h])

        return AutonomousSystem(dimension=2, rate_function=rate, labels=("R", "H"), domain=self.in_domain)


@dataclass(frozen=True)
class JacobianCoeffs:
    a: float
    b: float
    c_coef: float
    d: float

    def __post_init__(self):
        for name in ("a", "b", "c_coef", "d"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"Jacobian coefficient {name} is not finite")

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c_coef

    @property
    def discriminant(self) -> float:
        # (a-d)**2 + 4bc equals trace**2 - 4det without the cancellation
        return (self.a - self.d) ** 2 + 4.0 * self.b * self.c_coef

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c_coef, self.d]])


@dataclass(frozen=True)
class StabilityReport:
    equilibrium: tuple
    coeffs: JacobianCoeffs
    omega1: complex
    omega2: complex
    classification: str


@dataclass(frozen=True)
class PowerLawPoint:
    """One ``(u, v)`` pair; ``usable`` is False at or beyond saturation
    (``u <= 0`` or ``v <= 0``), where the log-log fit cannot use it."""

    u: float
    v: float

    @property
    def usable(self) -> bool:
        return self.u > 0.0 and self.v > 0.0


def equilibrium(system: CoupledLogisticSystem) -> Optional[tuple]:
    """Nontrivial fixed point ``(R0, H0)``, or None if either ``eta`` is zero."""
    R0 = saturation_value(system.r_params)
    H0 = saturation_value(system.h_params)
    if math.isinf(R0) or math.isinf(H0):
        return None
    return R0, H0


def jacobian(system: CoupledLogisticSystem, point: Sequence[float]) -> JacobianCoeffs:
    R, H = (float(x) for x in point)
    if not (math.isfinite(R) and math.isfinite(H)):
        raise DomainError(f"evaluation point must be finite, got {point!r}")
    if not system.in_domain((R, H)):
        raise DomainError(f"point {point!r} is outside the system's domain")
    return JacobianCoeffs(*system.partials(R, H))


def eigenvalues(coeffs: JacobianCoeffs):
    """Both roots of ``w**2 - trace*w + det = 0`` as complex numbers,
    ordered by descending real part, then ascending imaginary part."""
    a, b, c, d = coeffs.a, coeffs.b, coeffs.c_coef, coeffs.d
    if b == 0.0 or c == 0.0:
        # triangular: the diagonal is exact
        w1, w2 = complex(a), complex(d)
    else:
        tr, det, disc = coeffs.trace, coeffs.determinant, coeffs.discriminant
        if disc >= 0.0:
            sq = math.sqrt(disc)
            big = 0.5 * (tr + math.copysign(sq, tr))
            w1 = complex(big)
            w2 = complex(det / big) if big != 0.0 else 0j
        else:
            im = 0.5 * math.sqrt(-disc)
            w1, w2 = complex(0.5 * tr, im), complex(0.5 * tr, -im)
    return tuple(sorted((w1, w2), key=lambda w: (-w.real, w.imag)))


def classify_equilibrium(coeffs: JacobianCoeffs) -> str:
    """Classify the fixed point from trace, determinant and discriminant.

    Tests are made on quantities normalized by the largest coefficient so
    that the ``1e-12`` tolerance is scale free.
    """
    scale = max(abs(coeffs.a), abs(coeffs.b), abs(coeffs.c_coef), abs(coeffs.d))
    if scale == 0.0:
        return DEGENERATE
    tr = coeffs.trace / scale
    det = coeffs.determinant / scale**2
    disc = coeffs.discriminant / scale**2
    if abs(det) <= _CLASSIFY_TOL:
        return DEGENERATE
    if det < 0.0:
        return SADDLE
    if disc >= -_CLASSIFY_TOL:
        return STABLE_NODE if tr < 0.0 else UNSTABLE_NODE
    if abs(tr) <= _CLASSIFY_TOL:
        return CENTER
    return STABLE_FOCUS if tr < 0.0 else UNSTABLE_FOCUS


def stability_report(system: CoupledLogisticSystem, point: Optional[Sequence[float]] = None) -> StabilityReport:
    """Linear stability of ``system`` at ``point`` (default: its equilibrium)."""
    if point is None:
        point = equilibrium(system)
        if point is None:
            raise DomainError("eta = 0 in at least one variable: no finite nontrivial equilibrium")
    coeffs = jacobian(system, point)
    w1, w2 = eigenvalues(coeffs)
    return StabilityReport(
        equilibrium=tuple(float(x) for x in point),
        coeffs=coeffs,
        omega1=w1,
        omega2=w2,
        classification=classify_equilibrium(coeffs),
    )


def _flow_matrix(coeffs: JacobianCoeffs, t: float) -> np.ndarray:
    A = coeffs.as_matrix()
    eye = np.eye(2)
    mu = 0.5 * coeffs.trace
    disc = coeffs.discriminant
    z = 0.25 * disc * t * t  # (nu*t)**2, signed
    if z > 1.0:
        # well separated real roots: spectral projectors avoid the
        # cosh - sinh cancellation of the slower mode
        nu = 0.5 * math.sqrt(disc)
        w1, w2 = mu + nu, mu - nu
        P1 = (A - w2 * eye) / (w1 - w2)
        P2 = (A - w1 * eye) / (w2 - w1)
        return math.exp(w1 * t) * P1 + math.exp(w2 * t) * P2
    if abs(z) < 1e-8:
        ch = 1.0 + z / 2.0 + z * z / 24.0
        sh = 1.0 + z / 6.0 + z * z / 120.0
    elif z > 0.0:
        x = math.sqrt(z)
        ch, sh = math.cosh(x), math.sinh(x) / x
    else:
        x = math.sqrt(-z)
        ch, sh = math.cos(x), math.sin(x) / x
    # exp(At) = exp(mu t) [cosh(nu t) I + t sinh(nu t)/(nu t) (A - mu I)];
    # nu -> 0 gives the defective (1 + (a - w) t) exp(w t) form
    return math.exp(mu * t) * (ch * eye + t * sh * (A - mu * eye))


def linearized_flow(coeffs: JacobianCoeffs, perturbation0: Sequence[float], t):
    """Evolve ``(R', H')`` under ``d/dt x = J x`` for time ``t`` (scalar or array)."""
    x0 = np.asarray(perturbation0, dtype=float).reshape(2)
    t_arr = np.asarray(t, dtype=float)
    if t_arr.ndim == 0:
        return _flow_matrix(coeffs, float(t_arr)) @ x0
    return np.array([_flow_matrix(coeffs, float(ti)) @ x0 for ti in t_arr])


def power_law_transform(r_series, h_series, system: CoupledLogisticSystem) -> list:
    """Map aligned ``R`` and ``H`` samples to ``(u, v)`` points.

    ``u = H**(-alpha_h) - eta_h`` and ``v = R**(-alpha_r) - eta_r``.
    """
    R = np.asarray(r_series, dtype=float).reshape(-1)
    H = np.asarray(h_series, dtype=float).reshape(-1)
    if R.size != H.size:
        raise DomainError(f"series are misaligned: {R.size} R values vs {H.size} H values")
    if np.any(R <= 0) or np.any(H <= 0):
        raise DomainError("R and H must be positive")
    rp, hp = system.r_params, system.h_params
    v = R ** (-rp.alpha) - rp.eta
    u = H ** (-hp.alpha) - hp.eta
    return [PowerLawPoint(float(ui), float(vi)) for ui, vi in zip(u, v)]


def power_law_fit(points: Sequence[PowerLawPoint]) -> LineFit:
    """Log-log line through the usable points; slope estimates ``beta``."""
    usable = [(p.u, p.v) for p in points if p.usable]
    if len(usable) < 2:
        raise DomainError(f"only {len(usable)} usable (u, v) points; need at least 2")
    return loglog_slope(usable)


def beta_theoretical(system: CoupledLogisticSystem) -> float:
    """Exponent ``alpha_r*lam_r / (alpha_h*lam_h)``."""
    den = system.h_params.alpha * system.h_params.lam
    if den == 0.0:
        raise DomainError("alpha_h * lam_h is zero")
    return system.r_params.alpha * system.r_params.lam / den


def log_kappa_theoretical(system: CoupledLogisticSystem, c_r: float, c_h: float) -> float:
    """``ln kappa`` for the pair of closed-form trajectories with constants
    ``c_r`` and ``c_h`` (both positive)."""
    if c_r <= 0 or c_h <= 0:
        raise DomainError("integration constants must be positive")
    beta = beta_theoretical(system)
    return -system.r_params.alpha * math.log(c_r) + beta * system.h_params.alpha * math.log(c_h)

