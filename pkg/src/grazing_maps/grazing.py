"""Grazing-point classification and points on the section Pi_3.

A point of ``Sigma = {H = 0}`` is a regular grazing point of order 2k when
``L_X^j H`` vanishes for ``j < 2k`` and ``L_X^{2k} H`` does not.  For
order 4 the surface ``Pi_3 = {L_X^3 H = 0}`` is transverse to the orbit
and to ``Sigma``; the discontinuity mappings act on points of ``Pi_3``
lying a depth ``eps`` below ``Sigma``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import JacobianSingular, NoConvergence, NotOnBoundary
from .lie import lie_derivatives, lie_gradient, lie_mixed
from .sysdsl import ExpressionSystem, eval_expr

DEFAULT_ZERO_TOL = 1e-8
MAX_HALF_ORDER = 4  # orders up to 2k = 8


@dataclass(frozen=True)
class GrazingReport:
    point: tuple
    lie_values: tuple  # L_X^1 H .. L_X^{2 K_max} H
    order: int | None
    classification: str  # "order-2k", "transversal" or "unclassified"
    transversality_ok: bool
    transversality_value: float  # grad(L_X^3 H) . X, computed on the gradient path
    zero_tolerance: float
    scale: float

    @property
    def is_order4(self) -> bool:
        return self.order == 4

    def lie(self, k: int) -> float:
        return self.lie_values[k - 1]

    def summary(self) -> str:
        if self.order is not None:
            return f"order {self.order}, L_X^{self.order} H = {self.lie(self.order):.6f}"
        if self.classification == "transversal":
            return f"transversal, L_X H = {self.lie(1):.6f}"
        return "unclassified"


def classify(
    system: ExpressionSystem,
    x,
    zero_tolerance: float = DEFAULT_ZERO_TOL,
    max_half_order: int = MAX_HALF_ORDER,
    params=None,
) -> GrazingReport:
    """Classify ``x`` (a point of Sigma) by the contact order of the flow.

    A Lie value counts as zero when ``|L| <= zero_tolerance * scale`` with
    ``scale = max(1, max_j |L_X^j H|)``; scaling ``H`` by a positive
    constant therefore leaves the decision unchanged.  An odd first
    non-vanishing derivative above 1 (or none up to ``2*max_half_order``)
    is reported as "unclassified".
    """
    params = system.resolve_params(params)
    x = np.asarray(x, dtype=float)
    h = eval_expr(system.H, x, params)
    if abs(h) > zero_tolerance:
        raise NotOnBoundary(f"|H(x)| = {abs(h):.3e} exceeds the zero tolerance {zero_tolerance:g}")
    kmax = 2 * max_half_order
    values = lie_derivatives(system, x, kmax, params).values[1:]
    scale = max(1.0, float(np.max(np.abs(values))))
    nonzero = np.abs(values) > zero_tolerance * scale
    first = int(np.argmax(nonzero)) + 1 if nonzero.any() else None

    if first is None:
        order, label = None, "unclassified"
    elif first == 1:
        order, label = None, "transversal"
    elif first % 2 == 0:
        order, label = first, f"order-{first}"
    else:
        order, label = None, "unclassified"

    transversality = lie_mixed(system, "X", 3, x, params)
    return GrazingReport(
        point=tuple(float(v) for v in x),
        lie_values=tuple(float(v) for v in values),
        order=order,
        classification=label,
        transversality_ok=bool(abs(transversality) > zero_tolerance * scale),
        transversality_value=float(transversality),
        zero_tolerance=zero_tolerance,
        scale=scale,
    )


@dataclass(frozen=True)
class Pi3Point:
    eps: float
    state: np.ndarray
    h_residual: float  # H(x1) + eps
    l3_residual: float  # L_X^3 H(x1)
    iterations: int


def _l3(system, p, params):
    return float(lie_derivatives(system, p, 3, params).values[3])


def pi3_point(
    system: ExpressionSystem,
    eps: float,
    seed=None,
    grazing_point=None,
    params=None,
    max_iter: int = 50,
) -> Pi3Point:
    """Solve ``L_X^3 H(p) = 0``, ``H(p) = -eps`` by Newton's method.

    The default seed is ``x* - eps * e_n``.  For ``n = 2`` the unknowns are
    both coordinates.  For ``n > 2`` the search is restricted to the plane
    through the seed spanned by ``e_n`` and ``grad L_X^3 H(x*)``.
    """
    params = system.resolve_params(params)
    n = system.dim
    xstar = np.zeros(n) if grazing_point is None else np.asarray(grazing_point, dtype=float)
    if eps == 0 and seed is None:
        return Pi3Point(0.0, xstar.copy(), eval_expr(system.H, xstar, params), _l3(system, xstar, params), 0)
    p0 = xstar.copy() if seed is None else np.asarray(seed, dtype=float).copy()
    if seed is None:
        p0[-1] -= eps

    if n == 2:
        basis = np.eye(2)
    else:
        g = lie_gradient(system, xstar, 3, params)
        e_n = np.zeros(n)
        e_n[-1] = 1.0
        g = g - (g @ e_n) * e_n
        norm = np.linalg.norm(g)
        if norm == 0:
            raise JacobianSingular("grad L_X^3 H(x*) is parallel to e_n")
        basis = np.column_stack([g / norm, e_n])

    def residual(p):
        return np.array([_l3(system, p, params), eval_expr(system.H, p, params) + eps])

    coords = np.zeros(2)
    p = p0
    r = residual(p)
    h_tol = 1e-12 * max(1.0, eps)
    settled = 0
    for it in range(1, max_iter + 1):
        J = np.vstack([lie_gradient(system, p, 3, params), lie_gradient(system, p, 0, params)]) @ basis
        if abs(np.linalg.det(J)) < 1e-300 or not np.all(np.isfinite(J)):
            raise JacobianSingular(f"singular Newton matrix at {p}")
        step = np.linalg.solve(J, -r)
        coords = coords + step
        p = p0 + basis @ coords
        r_new = residual(p)
        converged = abs(r_new[0]) <= 1e-11 and abs(r_new[1]) <= h_tol
        stalled = np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(coords)))
        r = r_new
        if converged:
            # a couple of extra sweeps take the residual down to rounding
            settled += 1
            if settled >= 2 or stalled:
                return Pi3Point(float(eps), p, float(r[1]), float(r[0]), it)
    raise NoConvergence(f"Newton did not converge in {max_iter} iterations (residual {r})")
