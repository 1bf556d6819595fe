"""Numerical flow of ``x' = X(x)`` with dense output and event location.

Integration uses the explicit Dormand-Prince 8(5,3) pair from SciPy,
stepped manually so that every accepted step and its 7th-order
interpolant are kept.  Backward time is forward integration of ``-X``
in ``s = -t``; there is one code path.

Events are bracketed by sampling the interpolant at eight sub-steps per
accepted step (near a quartic tangency the functional is very flat, so
endpoint sign checks alone miss brackets) and refined with Brent's
bisection/secant method.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import brentq

from .errors import AmbiguousBracket, IntegrationError, NoCrossing
from .sysdsl import ExpressionSystem, eval_expr

DEFAULT_TOL = (1e-12, 1e-12)
SUBSTEPS = 8
MAX_STEPS = 200_000


def _rhs(system: ExpressionSystem, params, sign: float):
    X = system.X

    def f(_s, y):
        return np.array([sign * eval_expr(e, y, params) for e in X])

    return f


@dataclass
class Trajectory:
    """Accepted steps of one integration, in physical time ``t``."""

    times: np.ndarray
    states: np.ndarray
    interpolants: list = field(repr=False)
    t0: float = 0.0
    sign: float = 1.0
    n_steps: int = 0
    nfev: int = 0

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def __call__(self, t) -> np.ndarray:
        """Dense-output state at time ``t``."""
        s = self.sign * (t - self.t0)
        snodes = self.sign * (self.times - self.t0)
        if s < snodes[0] - 1e-15 or s > snodes[-1] + 1e-15:
            raise ValueError(f"t={t} outside the integrated span")
        i = int(np.clip(np.searchsorted(snodes, s) - 1, 0, len(self.interpolants) - 1))
        return self.interpolants[i](s)


def _make_solver(system, x0, length, tol, params, sign):
    atol, rtol = tol
    return DOP853(
        _rhs(system, params, sign), 0.0, np.asarray(x0, dtype=float), length, rtol=rtol, atol=atol
    )


def _step(solver, n_steps, max_steps):
    if n_steps >= max_steps:
        raise IntegrationError(f"maximum number of steps ({max_steps}) exceeded")
    message = solver.step()
    if solver.status == "failed":
        raise IntegrationError(message or "step size underflow")


def integrate(
    system: ExpressionSystem,
    x0,
    t_span: tuple[float, float],
    tol: tuple[float, float] = DEFAULT_TOL,
    params=None,
    max_steps: int = MAX_STEPS,
) -> Trajectory:
    """Integrate from ``t_span[0]`` to ``t_span[1]`` (either direction)."""
    params = system.resolve_params(params)
    t0, t1 = map(float, t_span)
    sign = 1.0 if t1 >= t0 else -1.0
    x0 = np.asarray(x0, dtype=float)
    length = abs(t1 - t0)
    times, states, interps = [t0], [x0.copy()], []
    if length == 0:
        return Trajectory(np.array(times), np.array(states), interps, t0, sign)
    solver = _make_solver(system, x0, length, tol, params, sign)
    n = 0
    while solver.status == "running":
        _step(solver, n, max_steps)
        n += 1
        interps.append(solver.dense_output())
        times.append(t0 + sign * solver.t)
        states.append(solver.y.copy())
    return Trajectory(np.array(times), np.array(states), interps, t0, sign, n, solver.nfev)


def flow_to(system, x0, t, tol=DEFAULT_TOL, params=None) -> np.ndarray:
    """``phi(x0, t)`` as the endpoint of an integration (not interpolated)."""
    return integrate(system, x0, (0.0, t), tol, params).final_state


def states_at(system, x0, times, tol=DEFAULT_TOL, params=None) -> list[np.ndarray]:
    """States at the given times, stopping the integrator exactly at each one."""
    x0 = np.asarray(x0, dtype=float)
    out = {}
    for direction in (1.0, -1.0):
        ts = sorted((t for t in times if direction * t > 0), key=abs)
        prev_t, state = 0.0, x0
        for t in ts:
            state = integrate(system, state, (prev_t, t), tol, params).final_state
            prev_t = t
            out[t] = state
    return [out[t] if t != 0 else x0.copy() for t in times]


# -- event location -------------------------------------------------------


@dataclass(frozen=True)
class EventHit:
    time: float
    state: np.ndarray
    residual: float
    bracket_width: float


def resolve_functional(system: ExpressionSystem, functional, params) -> Callable:
    """Map ``"H"``, ``"L3"`` (i.e. L_X^3 H) or a callable to ``state -> float``."""
    if callable(functional):
        return functional
    if functional == "H":
        return lambda y: eval_expr(system.H, y, params)
    if isinstance(functional, str) and functional.startswith("L"):
        from .lie import lie_derivatives

        k = int(functional[1:])
        return lambda y: float(lie_derivatives(system, y, k, params).values[k])
    raise ValueError(f"unknown functional {functional!r}")


def _sign_changes(values):
    s = np.sign(values)
    return [i for i in range(len(values) - 1) if s[i] == 0 or s[i] * s[i + 1] < 0]


def first_crossing(
    system: ExpressionSystem,
    x0,
    functional="H",
    direction: str = "backward",
    horizon: float = 10.0,
    tol: tuple[float, float] = DEFAULT_TOL,
    params=None,
    max_steps: int = MAX_STEPS,
) -> EventHit:
    """Earliest zero of ``functional`` along the trajectory in one time direction.

    Raises :class:`NoCrossing` when no sign change occurs within ``horizon``.
    """
    params = system.resolve_params(params)
    F = resolve_functional(system, functional, params)
    sign = {"forward": 1.0, "backward": -1.0}[direction]
    x0 = np.asarray(x0, dtype=float)
    f0 = F(x0)
    if f0 == 0:
        return EventHit(0.0, x0.copy(), 0.0, 0.0)
    if horizon <= 0:
        raise NoCrossing("empty search horizon")
    solver = _make_solver(system, x0, float(horizon), tol, params, sign)
    n = 0
    f_prev = f0
    while solver.status == "running":
        s_old = solver.t
        _step(solver, n, max_steps)
        n += 1
        dense = solver.dense_output()
        s_grid = np.linspace(s_old, solver.t, SUBSTEPS + 1)
        vals = [f_prev] + [F(dense(s)) for s in s_grid[1:]]
        changes = _sign_changes(vals)
        if changes:
            i = changes[0]
            a, b = s_grid[i], s_grid[i + 1]
            return _refine(F, dense, a, b, vals[i], vals[i + 1], sign)
        f_prev = vals[-1]
    raise NoCrossing(f"no sign change of {functional!r} within horizon {horizon:g} ({direction})")


def _refine(F, dense, a, b, fa, fb, sign) -> EventHit:
    g = lambda s: F(dense(s))
    if fb == 0:
        s_star = b
    elif fa == 0:
        s_star = a
    else:
        fine = np.linspace(a, b, 17)
        fvals = [fa] + [g(s) for s in fine[1:-1]] + [fb]
        changes = _sign_changes(fvals)
        if len(changes) > 1 and fine[changes[1]] - fine[changes[0] + 1] <= 1e-13 * max(1.0, abs(b)):
            raise AmbiguousBracket(f"several crossings inside [{a}, {b}]")
        i = changes[0]
        a, b, fa, fb = fine[i], fine[i + 1], fvals[i], fvals[i + 1]
        if fa == 0:
            s_star = a
        elif fb == 0:
            s_star = b
        else:
            s_star = brentq(g, a, b, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    state = dense(s_star)
    return EventHit(sign * float(s_star), state, float(F(state)), float(abs(b - a)))
