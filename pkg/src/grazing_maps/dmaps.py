"""Zero-time (ZDM) and Poincare (PDM) discontinuity mappings.

Numeric versions compose flows literally::

    x2 = phi(x1, delta)            first backward hit of Sigma, delta < 0
    x3 = R(x2) = x2 + W(x2) v      v = L_X H(x2)
    x4 = phi(x3, -delta)           ZDM(x1)
    x5 = phi(x4, Delta0)           PDM(x1), with L_X^3 H(x5) = 0

Analytic versions are the leading-order expansions at a regular grazing
point x* of order 4 (remainder O(eps), not modelled)::

    delta  ~ -(4!/L4)^(1/4) eps^(1/4)
    v      ~ -(4!)^(3/4)/3! L4^(1/4) eps^(3/4)
    ZDM    ~ x1 + W(x1) v
    Delta0 ~ -(L_W L_X^3 H(x1) / L4) v
    PDM    ~ x1 + [W(x1) - (L_W L_X^3 H(x1) / L4) X(x1)] v

where ``L4 = L_X^4 H(x*)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import NoCrossing, NonpositiveRadicand, NotOrder4
from .flow import DEFAULT_TOL, first_crossing, flow_to
from .grazing import classify
from .lie import lie_derivatives, lie_mixed, lie_value
from .sysdsl import ExpressionSystem, eval_expr

FACT4 = math.factorial(4)
FACT3 = math.factorial(3)


@dataclass(frozen=True)
class DmResult:
    method: str  # "numeric" or "analytic-order-4"
    eps: float
    x1: np.ndarray
    delta: float | None = None
    x2: np.ndarray | None = None
    v: float | None = None
    x3: np.ndarray | None = None
    x4: np.ndarray | None = None
    delta0: float | None = None
    x5: np.ndarray | None = None
    t_impact: float | None = None  # signed flow time x1 -> x2
    t_return: float | None = None  # signed flow time x3 -> x4
    h_residual: float | None = None  # H(x2)
    l3_residual: float | None = None  # L_X^3 H(x5)
    remainder: str | None = None

    def to_dict(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            out[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return out


def _xstar(system, grazing_point):
    if grazing_point is None:
        return np.zeros(system.dim)
    return np.asarray(grazing_point, dtype=float)


def l4_at(system: ExpressionSystem, point, params=None) -> float:
    return lie_value(system, point, 4, params)


def _positive_l4(system, point, params) -> float:
    l4 = l4_at(system, point, params)
    if not l4 > 0:
        raise NonpositiveRadicand(f"L_X^4 H = {l4:.6g} at {np.asarray(point).tolist()} is not positive")
    return l4


def require_order4(system: ExpressionSystem, grazing_point=None, params=None):
    report = classify(system, _xstar(system, grazing_point), params=params)
    if report.order != 4:
        raise NotOrder4(f"x* is {report.classification}, the analytic maps need order 4")
    return report


def delta_asymptotic(system: ExpressionSystem, eps: float, base=None, params=None) -> float:
    """Leading-order impact time ``-(4!/L_X^4 H(base))^(1/4) eps^(1/4)``.

    ``base`` defaults to the grazing point x* = 0; pass x1 for the
    variant that evaluates L_X^4 H at the input point.
    """
    l4 = _positive_l4(system, _xstar(system, base), params)
    return -((FACT4 / l4) ** 0.25) * eps**0.25


def _v_coefficient(l4):
    return FACT4**0.75 / FACT3 * l4**0.25


def v_leading(system: ExpressionSystem, eps: float, grazing_point=None, params=None) -> float:
    """Leading-order boundary velocity at impact, ``-(4!)^(3/4)/3! L4^(1/4) eps^(3/4)``."""
    l4 = _positive_l4(system, _xstar(system, grazing_point), params)
    return -_v_coefficient(l4) * eps**0.75


def delta0_asymptotic(system: ExpressionSystem, x1, eps: float, grazing_point=None, params=None) -> float:
    l4 = _positive_l4(system, _xstar(system, grazing_point), params)
    lw = lie_mixed(system, "W", 3, x1, params)
    return _v_coefficient(l4) * (lw / l4) * eps**0.75


def zdm_analytic(system: ExpressionSystem, x1, eps: float, grazing_point=None, params=None, check=True) -> DmResult:
    params = system.resolve_params(params)
    if check:
        require_order4(system, grazing_point, params)
    x1 = np.asarray(x1, dtype=float)
    v = v_leading(system, eps, grazing_point, params)
    w = np.array([eval_expr(e, x1, params) for e in system.W])
    return DmResult(
        method="analytic-order-4",
        eps=float(eps),
        x1=x1,
        delta=delta_asymptotic(system, eps, grazing_point, params),
        v=v,
        x4=x1 + w * v,
        remainder="O(eps)",
    )


def pdm_analytic(system: ExpressionSystem, x1, eps: float, grazing_point=None, params=None, check=True) -> DmResult:
    params = system.resolve_params(params)
    if check:
        require_order4(system, grazing_point, params)
    x1 = np.asarray(x1, dtype=float)
    xstar = _xstar(system, grazing_point)
    l4 = _positive_l4(system, xstar, params)
    v = v_leading(system, eps, grazing_point, params)
    ratio = lie_mixed(system, "W", 3, x1, params) / l4
    w = np.array([eval_expr(e, x1, params) for e in system.W])
    X = np.array([eval_expr(e, x1, params) for e in system.X])
    return DmResult(
        method="analytic-order-4",
        eps=float(eps),
        x1=x1,
        delta=delta_asymptotic(system, eps, grazing_point, params),
        v=v,
        x4=x1 + w * v,
        delta0=-ratio * v,
        x5=x1 + (w - ratio * X) * v,
        remainder="O(eps)",
    )


def _impact_horizon(system, eps, grazing_point, params):
    try:
        return 10.0 * abs(delta_asymptotic(system, eps, grazing_point, params))
    except NonpositiveRadicand:
        return 1.0


def zdm_numeric(
    system: ExpressionSystem,
    x1,
    eps: float,
    tol=DEFAULT_TOL,
    params=None,
    horizon: float | None = None,
    grazing_point=None,
) -> DmResult:
    """``x4 = phi(R(phi(x1, delta)), -delta)`` by integration and event location."""
    params = system.resolve_params(params)
    x1 = np.asarray(x1, dtype=float)
    if eps == 0 or eval_expr(system.H, x1, params) == 0:
        # x1 on Sigma is a tangency: R is the identity there
        return DmResult("numeric", float(eps), x1, 0.0, x1.copy(), 0.0, x1.copy(), x1.copy(),
                        t_impact=0.0, t_return=0.0, h_residual=0.0)
    if horizon is None:
        horizon = _impact_horizon(system, eps, grazing_point, params)
    hit = first_crossing(system, x1, "H", "backward", horizon, tol, params)
    delta = hit.time
    x2 = hit.state
    v = lie_value(system, x2, 1, params)
    w = np.array([eval_expr(e, x2, params) for e in system.W])
    x3 = x2 + w * v
    t_return = -delta
    x4 = flow_to(system, x3, t_return, tol, params)
    return DmResult(
        method="numeric",
        eps=float(eps),
        x1=x1,
        delta=delta,
        x2=x2,
        v=v,
        x3=x3,
        x4=x4,
        t_impact=delta,
        t_return=t_return,
        h_residual=hit.residual,
    )


def _nearest_pi3_crossing(system, x4, horizon, tol, params):
    hits = []
    for direction in ("forward", "backward"):
        try:
            hits.append(first_crossing(system, x4, "L3", direction, horizon, tol, params))
        except NoCrossing:
            pass
    if not hits:
        raise NoCrossing(f"no crossing of Pi_3 within +/-{horizon:g} of x4")
    # ties go to positive time
    return min(hits, key=lambda h: (abs(h.time), -h.time))


def pdm_numeric(
    system: ExpressionSystem,
    x1,
    eps: float,
    tol=DEFAULT_TOL,
    params=None,
    horizon: float | None = None,
    grazing_point=None,
) -> DmResult:
    """ZDM followed by the flow from x4 to the nearest crossing of Pi_3 (either direction)."""
    params = system.resolve_params(params)
    z = zdm_numeric(system, x1, eps, tol, params, grazing_point=grazing_point)
    x4 = z.x4
    if eps == 0:
        return DmResult(**{**z.__dict__, "delta0": 0.0, "x5": x4.copy(), "l3_residual": 0.0})
    if horizon is None:
        try:
            d0 = abs(delta0_asymptotic(system, z.x1, eps, grazing_point, params))
        except NonpositiveRadicand:
            d0 = 0.0
        horizon = max(10.0 * d0, abs(z.delta))
    hit = _nearest_pi3_crossing(system, x4, horizon, tol, params)
    return DmResult(**{**z.__dict__, "delta0": hit.time, "x5": hit.state, "l3_residual": hit.residual})


def gap(a: DmResult, b: DmResult, field: str = "x4") -> float:
    return float(np.linalg.norm(getattr(a, field) - getattr(b, field)))
