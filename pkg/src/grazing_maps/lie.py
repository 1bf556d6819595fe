"""Lie derivatives of H along the flow of X.

``L_X^k H(x)`` is the k-th time derivative of ``H(phi(x, t))`` at ``t = 0``.
We build the Taylor jet of the solution ``x(t) = x + c1 t + c2 t^2 + ...``
by matching coefficients in ``x' = X(x)``::

    c_{j+1} = [t^j] X(x(t)) / (j + 1)

and read off the jet of ``H(x(t))``.  One pass of order K gives every
``L_X^k H`` with ``k <= K``, exactly for polynomial fields.

Gradients of ``p -> L_X^k H(p)`` use a complex-step deformation of one
base coordinate at a time: ``Im L(x + i h e_j) / h`` with ``h = 1e-20``
has no subtractive cancellation, so it is accurate to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jets import JetValue
from .sysdsl import ExpressionSystem, eval_expr, eval_jet

COMPLEX_STEP = 1e-20


@dataclass(frozen=True)
class LieTable:
    point: tuple
    values: np.ndarray  # [H, L_X H, ..., L_X^K H]

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k):
        return self.values[k]


def solution_jet(system: ExpressionSystem, x, order: int, params=None) -> list[JetValue]:
    """Taylor jet (raw coefficients) of the trajectory through ``x``."""
    params = system.resolve_params(params)
    x = np.asarray(x)
    dtype = complex if np.iscomplexobj(x) else float
    coeffs = np.zeros((system.dim, order + 1), dtype=dtype)
    coeffs[:, 0] = x
    for j in range(order):
        truncated = [JetValue(coeffs[i, : j + 1]) for i in range(system.dim)]
        for i, e in enumerate(system.X):
            coeffs[i, j + 1] = eval_jet(e, truncated, params)[j] / (j + 1)
    return [JetValue(c) for c in coeffs]


def _raw_lie_values(system, x, order, params):
    jets = solution_jet(system, x, order, params)
    h_jet = eval_jet(system.H, jets, params)
    return np.array([math.factorial(k) * a for k, a in enumerate(h_jet.coeffs)])


def lie_derivatives(system: ExpressionSystem, x, order: int, params=None) -> LieTable:
    """Return ``[H(x), L_X H(x), ..., L_X^order H(x)]``."""
    if order < 1:
        raise ValueError("order must be at least 1")
    params = system.resolve_params(params)
    x = np.asarray(x, dtype=float)
    values = _raw_lie_values(system, x, order, params)
    values[0] = eval_expr(system.H, x, params)
    return LieTable(tuple(float(v) for v in x), values)


def lie_value(system, x, k, params=None) -> float:
    if k == 0:
        return eval_expr(system.H, x, system.resolve_params(params))
    return float(lie_derivatives(system, x, k, params).values[k])


def lie_gradient(system: ExpressionSystem, x, k: int, params=None) -> np.ndarray:
    """Gradient of ``p -> L_X^k H(p)`` at ``x`` (k = 0 gives grad H)."""
    params = system.resolve_params(params)
    x = np.asarray(x, dtype=float)
    grad = np.empty(system.dim)
    for j in range(system.dim):
        xc = x.astype(complex)
        xc[j] += 1j * COMPLEX_STEP
        if k == 0:
            val = eval_expr_complex(system.H, xc, params)
        else:
            val = _raw_lie_values(system, xc, k, params)[k]
        grad[j] = val.imag / COMPLEX_STEP
    return grad


def eval_expr_complex(expr, point, params):
    jets = [JetValue(np.array([v], dtype=complex)) for v in point]
    return eval_jet(expr, jets, params)[0]


def lie_mixed(system: ExpressionSystem, direction, k: int, x, params=None) -> float:
    """``L_D L_X^k H(x) = grad(L_X^k H)(x) . D(x)`` for ``D`` = "W", "X" or expressions."""
    params = system.resolve_params(params)
    if isinstance(direction, str):
        exprs = {"W": system.W, "X": system.X}[direction]
    else:
        exprs = direction
    d = np.array([eval_expr(e, x, params) for e in exprs])
    if not np.any(d):
        return 0.0
    return float(lie_gradient(system, x, k, params) @ d)


def fd_weights(offsets, k):
    """Fornberg weights for the k-th derivative at 0 on the given offsets."""
    offsets = list(offsets)
    n = len(offsets)
    c = np.zeros((n, k + 1))
    c1, c4 = 1.0, offsets[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, k)
        c2, c5 = 1.0, c4
        c4 = offsets[i]
        for j in range(i):
            c3 = offsets[i] - offsets[j]
            c2 *= c3
            if j == i - 1:
                for m in range(mn, 0, -1):
                    c[i, m] = c1 * (m * c[i - 1, m - 1] - c5 * c[i - 1, m]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for m in range(mn, 0, -1):
                c[j, m] = (c4 * c[j, m] - m * c[j, m - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, k]


def stencil_halfwidth(k: int, accuracy: int = 4) -> int:
    """Half-width of the central stencil for the k-th derivative with the given (even) accuracy order."""
    if accuracy < 2 or accuracy % 2:
        raise ValueError("accuracy must be an even integer >= 2")
    return (k + 1) // 2 - 1 + accuracy // 2


def lie_fd_check(
    system: ExpressionSystem,
    x,
    order: int,
    step: float = 1e-2,
    params=None,
    tol=(1e-13, 1e-13),
    accuracy: int = 8,
):
    """Finite-difference estimates of ``L_X^k H(x)``, k = 1..order.

    ``H`` is sampled along numerically integrated trajectories at
    ``t = m*step`` and differentiated with central stencils of the given
    accuracy order.  The default of 8 matters: with integration noise near
    1e-13 a short stencil needs a large step and then loses to truncation.
    Returns an array indexed like ``LieTable.values`` (entry 0 is ``H(x)``).
    """
    from .flow import states_at

    if step <= 0:
        raise ValueError("step must be positive")
    params = system.resolve_params(params)
    m = stencil_halfwidth(order, accuracy)
    times = [i * step for i in range(-m, m + 1)]
    states = states_at(system, x, times, tol=tol, params=params)
    h = np.array([eval_expr(system.H, s, params) for s in states])
    out = np.empty(order + 1)
    out[0] = eval_expr(system.H, x, params)
    for k in range(1, order + 1):
        mk = stencil_halfwidth(k, accuracy)
        idx = slice(m - mk, m + mk + 1)
        w = fd_weights(range(-mk, mk + 1), k)
        out[k] = float(w @ h[idx]) / step**k
    return out
