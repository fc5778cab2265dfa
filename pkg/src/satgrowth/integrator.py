"""Explicit Runge-Kutta integration of autonomous first-order systems.

Two schemes are provided:

* ``"rk4"``  classical fixed-step fourth order, bitwise reproducible;
* ``"rk45"`` Dormand-Prince 5(4) embedded pair with step-size control.

Output at arbitrary times uses cubic Hermite interpolation between the
integrator's own nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, IntegrationError

__all__ = ["AutonomousSystem", "Trajectory", "integrate", "hermite_interpolate"]


@dataclass(frozen=True)
class AutonomousSystem:
    """``dx/dt = rate_function(x)`` in ``dimension`` variables.

    ``domain``, when given, is a predicate on a state vector; a state for
    which it returns False halts integration.
    """

    dimension: int
    rate_function: Callable[[np.ndarray], np.ndarray]
    labels: tuple = ()
    domain: Optional[Callable[[np.ndarray], bool]] = None

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise ValueError("dimension must be a positive integer")
        labels = tuple(self.labels) or tuple(f"x{i}" for i in range(self.dimension))
        if len(labels) != self.dimension:
            raise ValueError(f"expected {self.dimension} labels, got {len(labels)}")
        object.__setattr__(self, "labels", labels)

    def __call__(self, state):
        return np.asarray(self.rate_function(state), dtype=float).reshape(self.dimension)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), dimension)
    labels: tuple = ()
    n_accepted: int = 0
    n_rejected: int = 0
    method: str = "rk4"
    # integrator nodes and slopes, kept for dense output
    nodes: Optional[np.ndarray] = field(default=None, repr=False)
    node_states: Optional[np.ndarray] = field(default=None, repr=False)
    node_slopes: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.states.shape[0] != self.times.shape[0]:
            raise ValueError("states and times differ in length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def step_stats(self):
        return {"accepted": self.n_accepted, "rejected": self.n_rejected}

    def __call__(self, t):
        """Dense output at ``t`` (within the integrated span)."""
        if self.nodes is None:
            raise ValueError("trajectory carries no dense-output data")
        return hermite_interpolate(self.nodes, self.node_states, self.node_slopes, t)


def hermite_interpolate(nodes, states, slopes, t):
    """Piecewise cubic Hermite interpolation through ``(nodes, states, slopes)``."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(t < nodes[0]) or np.any(t > nodes[-1]):
        raise ValueError("interpolation time outside the integrated span")
    idx = np.clip(np.searchsorted(nodes, t, side="right") - 1, 0, len(nodes) - 2)
    h = (nodes[idx + 1] - nodes[idx])[:, None]
    s = ((t - nodes[idx])[:, None]) / h
    y0, y1 = states[idx], states[idx + 1]
    f0, f1 = slopes[idx], slopes[idx + 1]
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    out = h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1
    # exact node hits return the node state untouched
    hit = t == nodes[idx + 1]
    out[hit] = states[idx + 1][hit]
    hit = t == nodes[idx]
    out[hit] = states[idx][hit]
    return out[0] if scalar else out


def _evaluate(system, y, t):
    try:
        f = system(y)
    except DomainError as exc:
        raise IntegrationError(f"rate function left its domain at t={t}: {exc}", t=t) from exc
    if not np.all(np.isfinite(f)):
        raise IntegrationError(f"non-finite derivative at t={t}", t=t)
    return f


def _check_state(system, y, t):
    if not np.all(np.isfinite(y)):
        raise IntegrationError(f"non-finite state at t={t}", t=t)
    if system.domain is not None and not system.domain(y):
        raise IntegrationError(f"state {y.tolist()} left the domain at t={t}", t=t)


def _rk4(system, y0, t0, t1, step):
    n = max(1, int(math.ceil((t1 - t0) / step - 1e-9)))
    h = (t1 - t0) / n
    times = t0 + h * np.arange(n + 1)
    times[-1] = t1
    ys = np.empty((n + 1, y0.size))
    fs = np.empty_like(ys)
    ys[0] = y0
    y = y0
    k1 = _evaluate(system, y, t0)
    fs[0] = k1
    for i in range(n):
        t = times[i]
        k2 = _evaluate(system, y + 0.5 * h * k1, t)
        k3 = _evaluate(system, y + 0.5 * h * k2, t)
        k4 = _evaluate(system, y + h * k3, t)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_state(system, y, times[i + 1])
        ys[i + 1] = y
        k1 = _evaluate(system, y, times[i + 1])
        fs[i + 1] = k1
    return times, ys, fs, n, 0


# Dormand-Prince 5(4) tableau
_A = [np.array(row) for row in [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _initial_step(system, y0, f0, t0, t1, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t1 - t0)
    try:
        f1 = system(y0 + h0 * f0)
        d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    except DomainError:
        return h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, t1 - t0)


def _rk45(system, y0, t0, t1, rtol, atol, max_steps):
    t, y = t0, y0
    f = _evaluate(system, y, t)
    h = _initial_step(system, y, f, t0, t1, rtol, atol)
    times, ys, fs = [t], [y], [f]
    accepted = rejected = 0
    k = np.empty((7, y0.size))
    while t < t1:
        if accepted + rejected >= max_steps:
            raise IntegrationError(f"exceeded {max_steps} steps at t={t}", t=t)
        h = min(h, t1 - t)
        if h <= 16 * np.spacing(max(abs(t), 1.0)):
            raise IntegrationError(f"step size underflow at t={t}", t=t)
        k[0] = f
        try:
            for s in range(1, 7):
                k[s] = system(y + h * (_A[s] @ k[:s]))
            ok = np.all(np.isfinite(k))
        except DomainError:
            ok = False
        if not ok:
            rejected += 1
            h *= 0.25
            continue
        y_new = y + h * (_B5 @ k)
        err_vec = h * (_E @ k) / (atol + rtol * np.maximum(np.abs(y), np.abs(y_new)))
        err = float(np.sqrt(np.mean(err_vec**2)))
        if err <= 1.0:
            t_new = t + h if t1 - (t + h) > 1e-12 * max(abs(t1), 1.0) else t1
            _check_state(system, y_new, t_new)
            t, y, f = t_new, y_new, k[6].copy()
            times.append(t)
            ys.append(y)
            fs.append(f)
            accepted += 1
            factor = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** (-0.2))
        else:
            rejected += 1
            factor = max(0.2, 0.9 * err ** (-0.2))
        h *= factor
    return np.array(times), np.array(ys), np.array(fs), accepted, rejected


def integrate(
    system: AutonomousSystem,
    initial_state: Sequence[float],
    t_span: Sequence[float],
    method: str = "rk45",
    step: float = 0.01,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    t_eval: Optional[Sequence[float]] = None,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Integrate ``system`` from ``initial_state`` over ``t_span = (t0, t1)``.

    Parameters
    ----------
    method : {"rk4", "rk45"}
        Fixed-step classical RK4 (uses ``step``) or adaptive Dormand-Prince
        (uses ``rtol``/``atol``).
    t_eval : array_like, optional
        Output times inside ``t_span``. Defaults to the integrator's own
        nodes. Off-node values are cubic Hermite interpolants, accurate to
        fourth order in the local node spacing rather than to ``rtol``.

    Raises
    ------
    IntegrationError
        When the state leaves the system's domain or a derivative is not
        finite; ``exc.t`` carries the offending time.
    """
    t0, t1 = (float(v) for v in t_span)
    if not (math.isfinite(t0) and math.isfinite(t1)) or t1 <= t0:
        raise ValueError(f"t_span must satisfy t0 < t1, got {t_span!r}")
    y0 = np.asarray(initial_state, dtype=float).reshape(-1)
    if y0.size != system.dimension:
        raise ValueError(f"initial state has {y0.size} components, system has {system.dimension}")
    if not np.all(np.isfinite(y0)):
        raise ValueError("initial state must be finite")
    _check_state(system, y0, t0)

    if method == "rk4":
        if not step > 0:
            raise ValueError("step must be positive")
        nodes, ys, fs, acc, rej = _rk4(system, y0, t0, t1, float(step))
    elif method == "rk45":
        if not (rtol > 0 and atol > 0):
            raise ValueError("tolerances must be positive")
        nodes, ys, fs, acc, rej = _rk45(system, y0, t0, t1, rtol, atol, max_steps)
    else:
        raise ValueError(f"unknown method {method!r}")

    if t_eval is None:
        times, states = nodes, ys
    else:
        times = np.asarray(t_eval, dtype=float)
        states = hermite_interpolate(nodes, ys, fs, times)
    return Trajectory(
        times=times,
        states=states,
        labels=system.labels,
        n_accepted=acc,
        n_rejected=rej,
        method=method,
        nodes=nodes,
        node_states=ys,
        node_slopes=fs,
    )
