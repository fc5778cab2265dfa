"""Least-squares calibration of the logistic closed form, and log-log lines.

The fit minimizes the sum of squared log residuals

    sum_i (ln phi(t_i) - ln v_i)**2

over ``(ln lam, ln eta, ln c)`` and optionally ``alpha``, using a damped
Gauss-Newton (Levenberg-Marquardt) iteration restarted from several
seeded initial points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DataError, DomainError, FitError
from .growth_core import GrowthParams, SolutionSpec, constant_from_initial, saturation_value

__all__ = [
    "SERIES_LABELS",
    "TimeSeries",
    "FitResult",
    "LineFit",
    "cumulative",
    "initial_guess",
    "fit_logistic",
    "log_model",
    "loglog_slope",
    "levenberg_marquardt",
]

SERIES_LABELS = ("annual-revenue", "cumulative-revenue", "headcount", "net-earnings", "other")

ALPHA_BOUNDS = (0.1, 5.0)
_LOG_LAM_BOUNDS = (math.log(1e-8), math.log(1e2))
_LOG_BOUND = 700.0


@dataclass(frozen=True)
class TimeSeries:
    """Observed values on a strictly increasing grid of years since ``t_origin``."""

    t: np.ndarray
    values: np.ndarray
    label: str = "other"
    t_origin: float = 0.0
    units: str = ""

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).reshape(-1)
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if t.shape != v.shape:
            raise DataError(f"t has {t.size} points but values has {v.size}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise DataError("time series entries must be finite")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            i = int(np.flatnonzero(np.diff(t) <= 0)[0]) + 1
            raise DataError(f"t must be strictly increasing (violated at index {i})")
        if self.label not in SERIES_LABELS:
            raise DataError(f"unknown series label {self.label!r}; expected one of {SERIES_LABELS}")
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "t_origin", float(self.t_origin))

    def __len__(self):
        return self.t.size

    def require_positive(self):
        bad = np.flatnonzero(self.values <= 0)
        if bad.size:
            raise DataError(f"values must be positive for log-space fitting; offending indices {bad.tolist()}")


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int = 0


@dataclass
class FitResult:
    params: GrowthParams
    c: float
    alpha_fixed: bool
    residual_rms_log: float
    residuals: np.ndarray
    objective: float
    initial_objective: float
    n_evaluations: int
    converged: bool
    t_origin: float = 0.0
    seed: Optional[int] = None
    weakly_identified: tuple = ()
    starts: list = field(default_factory=list)

    @property
    def spec(self) -> SolutionSpec:
        return SolutionSpec(self.params, self.c, self.t_origin)


def cumulative(series: TimeSeries) -> TimeSeries:
    """Running sum of an annual series, relabelled as cumulative revenue."""
    if len(series) == 0:
        raise DataError("cannot accumulate an empty series")
    if series.label not in ("annual-revenue", "other"):
        raise DataError(f"running sum is defined for annual-revenue or other series, not {series.label!r}")
    return TimeSeries(
        t=series.t,
        values=np.cumsum(series.values),
        label="cumulative-revenue",
        t_origin=series.t_origin,
        units=series.units,
    )


def log_model(theta: np.ndarray, t: np.ndarray, alpha: float) -> np.ndarray:
    """``ln phi(t)`` for ``theta = (ln lam, ln eta, ln c)``, evaluated stably."""
    log_lam, log_eta, log_c = theta[:3]
    x = -alpha * log_c - alpha * math.exp(log_lam) * t
    return -np.logaddexp(log_eta, x) / alpha


def _log_model_jacobian(theta, t, alpha, with_alpha):
    log_lam, log_eta, log_c = theta[:3]
    lam = math.exp(log_lam)
    x = -alpha * log_c - alpha * lam * t
    L = np.logaddexp(log_eta, x)
    q = np.exp(x - L)  # share of the transient term in the bracket
    p = np.exp(log_eta - L)
    cols = [q * lam * t, -p / alpha, q]
    if with_alpha:
        cols.append(L / alpha**2 + q * (log_c + lam * t) / alpha)
    return np.column_stack(cols)


def levenberg_marquardt(fun, jac, x0, lower=None, upper=None, ftol=1e-12, max_iter=200):
    """Minimize ``sum(fun(x)**2)`` by damped Gauss-Newton steps.

    Marquardt scaling is used for the damping term and steps are clipped
    to the box ``[lower, upper]``. Iteration stops when an accepted step
    lowers the objective by less than ``ftol`` relative, or after
    ``max_iter`` iterations.

    Returns
    -------
    dict with keys ``x``, ``cost`` (sum of squares), ``n_eval``, ``n_iter``
    and ``converged``.
    """
    x = np.array(x0, dtype=float)
    lo = np.full_like(x, -np.inf) if lower is None else np.asarray(lower, dtype=float)
    hi = np.full_like(x, np.inf) if upper is None else np.asarray(upper, dtype=float)
    x = np.clip(x, lo, hi)
    r = fun(x)
    n_eval = 1
    cost = float(r @ r)
    if not math.isfinite(cost):
        return {"x": x, "cost": cost, "n_eval": n_eval, "n_iter": 0, "converged": False}
    J = jac(x)
    A = J.T @ J
    g = J.T @ r
    mu = 1e-3 * max(float(np.max(np.diag(A))), 1e-300)
    nu = 2.0
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        if cost == 0.0 or not np.any(g):
            converged = True
            break
        D = np.maximum(np.diag(A), 1e-12 * max(float(np.max(np.diag(A))), 1e-300))
        try:
            step = np.linalg.solve(A + mu * np.diag(D), -g)
        except np.linalg.LinAlgError:
            mu *= nu
            nu *= 2.0
            continue
        x_new = np.clip(x + step, lo, hi)
        step = x_new - x
        if not np.any(step):
            converged = True
            break
        r_new = fun(x_new)
        n_eval += 1
        cost_new = float(r_new @ r_new)
        lin = r + J @ step
        predicted = cost - float(lin @ lin)
        actual = cost - cost_new
        if math.isfinite(cost_new) and actual > 0.0 and predicted > 0.0:
            rho = actual / predicted
            x, r, cost = x_new, r_new, cost_new
            J = jac(x)
            A = J.T @ J
            g = J.T @ r
            mu *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
            nu = 2.0
            if actual <= ftol * (cost + actual):
                converged = True
                break
        else:
            mu *= nu
            nu *= 2.0
            if mu > 1e30 * max(float(np.max(np.diag(A))), 1e-300):
                # no descent left at machine precision
                converged = True
                break
    return {"x": x, "cost": cost, "n_eval": n_eval, "n_iter": it, "converged": converged}


def initial_guess(series: TimeSeries, alpha: float = 1.0):
    """Heuristic starting point ``(GrowthParams, c)`` for the fit.

    ``lam`` is the log-linear slope over the first third of the series,
    ``eta`` puts the ceiling 10% above the largest observation (in the
    ``eta`` scale) and ``c`` matches the first point under pure
    exponential growth.
    """
    if len(series) < 4:
        raise DataError(f"need at least 4 points for an initial guess, got {len(series)}")
    series.require_positive()
    t, v = series.t, series.values
    n_head = max(2, int(math.ceil(len(t) / 3)))
    lam = float(np.polyfit(t[:n_head], np.log(v[:n_head]), 1)[0])
    if not (math.isfinite(lam) and lam > 0.0):
        span = t[-1] - t[0]
        lam = float(np.log(v.max() / v[0]) / span) if v.max() > v[0] else 0.0
        if not lam > 0.0:
            lam = 1.0 / span
    eta = 0.9 * float(v.max()) ** (-alpha)
    c = constant_from_initial(GrowthParams(alpha, lam, 0.0), float(v[0]), float(t[0]))
    return GrowthParams(alpha, lam, eta), c


def _theta_from(params: GrowthParams, c: float):
    return np.array([math.log(params.lam), math.log(params.eta), math.log(c)])


def fit_logistic(
    series: TimeSeries,
    alpha: Union[float, str] = 1.0,
    starts: int = 16,
    seed: Optional[int] = 0,
    max_iter: int = 200,
    ftol: float = 1e-12,
) -> FitResult:
    """Calibrate ``(lam, eta, c)`` and optionally ``alpha`` to ``series``.

    Parameters
    ----------
    alpha : float or "free"
        A fixed saturation exponent, or ``"free"`` to fit it within
        ``[0.1, 5]``.
    starts : int
        Number of multistart runs. Run 0 starts at :func:`initial_guess`;
        the others are seeded log-normal perturbations of it.
    seed : int, optional
        Seed for the perturbations. Identical inputs and seed give
        identical results.

    Raises
    ------
    FitError
        If the series is degenerate or no start converges.
    """
    free = isinstance(alpha, str)
    if free and alpha != "free":
        raise ValueError(f"alpha must be a number or 'free', got {alpha!r}")
    n_min = 5 if free else 3
    if len(series) < max(n_min, 4):
        raise DataError(f"need at least {max(n_min, 4)} points, got {len(series)}")
    series.require_positive()
    if np.ptp(series.values) == 0.0:
        raise FitError("degenerate series: all values are equal")
    if starts < 1:
        raise ValueError("starts must be >= 1")

    t = series.t
    logv = np.log(series.values)
    rng = np.random.default_rng(seed)
    alpha0 = 1.0 if free else float(alpha)
    base_params, base_c = initial_guess(series, alpha0)

    lower = [_LOG_LAM_BOUNDS[0], -_LOG_BOUND, -_LOG_BOUND]
    upper = [_LOG_LAM_BOUNDS[1], _LOG_BOUND, _LOG_BOUND]
    if free:
        lower.append(ALPHA_BOUNDS[0])
        upper.append(ALPHA_BOUNDS[1])

    def split(x):
        return (x[:3], x[3]) if free else (x, alpha0)

    def fun(x):
        theta, a = split(x)
        return log_model(theta, t, a) - logv

    def jac(x):
        theta, a = split(x)
        return _log_model_jacobian(theta, t, a, free)

    runs = []
    initial_objective = None
    for k in range(starts):
        if k == 0:
            a_k = alpha0
            x0 = _theta_from(base_params, base_c)
        else:
            a_k = float(np.clip(alpha0 * math.exp(0.5 * rng.standard_normal()), *ALPHA_BOUNDS)) if free else alpha0
            p_k, c_k = initial_guess(series, a_k) if free else (base_params, base_c)
            x0 = _theta_from(p_k, c_k) + rng.normal(0.0, [0.3, 0.5, 0.5])
        if free:
            x0 = np.append(x0, a_k)
        if k == 0:
            r0 = fun(x0)
            initial_objective = float(r0 @ r0)
        try:
            out = levenberg_marquardt(fun, jac, x0, lower, upper, ftol=ftol, max_iter=max_iter)
        except (FloatingPointError, ValueError, DomainError) as exc:
            out = {"x": x0, "cost": math.inf, "n_eval": 0, "n_iter": 0, "converged": False, "error": str(exc)}
        out["start"] = k
        runs.append(out)

    ok = [r for r in runs if r["converged"] and math.isfinite(r["cost"])]
    if not ok:
        best = min(runs, key=lambda r: (r["cost"], r["start"]))
        raise FitError(
            f"none of {starts} starts converged",
            diagnostics={"best_cost": best["cost"], "best_x": best["x"].tolist(), "n_iter": best["n_iter"]},
        )
    best = min(ok, key=lambda r: (r["cost"], r["start"]))
    theta, a = split(best["x"])
    params = GrowthParams(float(a), math.exp(theta[0]), math.exp(theta[1]))
    c = math.exp(theta[2])
    residuals = fun(best["x"])

    flags = []
    phi_sat = saturation_value(params)
    if series.values.max() < 0.5 * phi_sat:
        flags.append("eta")
    if series.values[0] > 0.9 * phi_sat:
        flags.extend(["lam", "c"])

    return FitResult(
        params=params,
        c=c,
        alpha_fixed=not free,
        residual_rms_log=float(np.sqrt(np.mean(residuals**2))),
        residuals=residuals,
        objective=float(best["cost"]),
        initial_objective=initial_objective,
        n_evaluations=int(sum(r["n_eval"] for r in runs)),
        converged=True,
        t_origin=series.t_origin,
        seed=seed,
        weakly_identified=tuple(flags),
        starts=[
            {"start": r["start"], "objective": r["cost"], "iterations": r["n_iter"], "converged": r["converged"]}
            for r in runs
        ],
    )


def loglog_slope(points: Sequence) -> LineFit:
    """Ordinary least squares of ``ln v`` on ``ln u`` for ``(u, v)`` pairs."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] < 2:
        raise DataError("need at least 2 points for a line fit")
    bad = np.flatnonzero((pts[:, 0] <= 0) | (pts[:, 1] <= 0) | ~np.isfinite(pts).all(axis=1))
    if bad.size:
        raise DataError(f"log-log fit needs positive coordinates; offending indices {bad.tolist()}")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0.0:
        raise DataError("all u values coincide; slope is undefined")
    slope = float(((x - xm) * (y - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    ss_res = float(((y - intercept - slope * x) ** 2).sum())
    ss_tot = float(((y - ym) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return LineFit(slope=slope, intercept=intercept, r_squared=r2, n_points=int(pts.shape[0]))
