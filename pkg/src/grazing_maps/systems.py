"""Built-in systems with closed-form references.

The DSL sources ship as plain text in ``grazing_maps/data`` so they can be
copied and edited.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import UnknownSystem
from .sysdsl import ExpressionSystem, parse_system

NAMES = ("paper-hamiltonian", "monomial4", "parabola2")

DESCRIPTIONS = {
    "paper-hamiltonian": "perturbed quartic Hamiltonian, order-4 grazing at (0,0), L_X^4 H = 6",
    "monomial4": "X = (1, c x^3), H = y, W = (k, 0); order-4 grazing, exact flow",
    "parabola2": "X = (1, 2x), H = y, W = (k, 0); order-2 grazing (negative control)",
}


@dataclass(frozen=True)
class BuiltinSystem:
    name: str
    source: str
    system: ExpressionSystem
    grazing_point: tuple = (0.0, 0.0)
    exact_delta: Callable | None = field(default=None, repr=False)
    exact_flow: Callable | None = field(default=None, repr=False)
    exact_lie: Callable | None = field(default=None, repr=False)

    @property
    def defaults(self) -> dict:
        return self.system.parameters


def source_path(name: str) -> Path:
    if name not in NAMES:
        raise UnknownSystem(f"unknown system '{name}' (choose from {', '.join(NAMES)})")
    return Path(str(resources.files("grazing_maps") / "data" / f"{name}.sys"))


def _monomial_refs(p):
    c = p["c"]

    def delta(eps):
        return -((4.0 * eps / c) ** 0.25)

    def flow(x0, t):
        x, y = x0
        return np.array([x + t, y + c / 4.0 * ((x + t) ** 4 - x**4)])

    def lie(x0, order):
        x, y = x0
        vals = [y, c * x**3, 3 * c * x**2, 6 * c * x, 6 * c]
        return np.array((vals + [0.0] * order)[: order + 1], dtype=float)

    return delta, flow, lie


def _parabola_refs(_p):
    def delta(eps):
        return -math.sqrt(eps)

    def flow(x0, t):
        x, y = x0
        return np.array([x + t, y + (x + t) ** 2 - x**2])

    def lie(x0, order):
        x, y = x0
        vals = [y, 2 * x, 2.0]
        return np.array((vals + [0.0] * order)[: order + 1], dtype=float)

    return delta, flow, lie


def builtin(name: str, **overrides) -> BuiltinSystem:
    """Load a built-in system, optionally overriding parameter defaults."""
    source = source_path(name).read_text(encoding="utf-8")
    system = parse_system(source)
    if overrides:
        system = system.with_params(overrides)
    p = system.parameters
    refs = {"monomial4": _monomial_refs, "parabola2": _parabola_refs}.get(name)
    delta = flow = lie = None
    if refs is not None:
        delta, flow, lie = refs(p)
    return BuiltinSystem(name, source, system, (0.0, 0.0), delta, flow, lie)


def load_system(ref: str, params: dict | None = None) -> tuple[ExpressionSystem, str]:
    """Resolve a built-in name or a path to a system file."""
    if ref in NAMES:
        system = builtin(ref).system
    else:
        path = Path(ref)
        if not path.is_file():
            raise UnknownSystem(f"'{ref}' is neither a built-in system nor a readable file")
        system = parse_system(path.read_text(encoding="utf-8"))
    if params:
        system = system.with_params(params)
    return system, ref


def gamma_level(point) -> float:
    """``x^4 + (y-1)^4 - 1``: zero on the periodic orbit of paper-hamiltonian."""
    x, y = point
    return x**4 + (y - 1) ** 4 - 1


def hamiltonian_pdm_closed_form(x1, eps, xi, k):
    """Candidate closed form for the PDM of paper-hamiltonian with W = (k, 0).

    ``x1 - (4!)^(3/4) 6^(1/4)/3! * (-k, -xi) * eps^(3/4)``.  Kept for
    comparison only: it disagrees with both the numeric PDM and the
    general order-4 formula on this system (see README).
    """
    coef = math.factorial(4) ** 0.75 * 6**0.25 / math.factorial(3)
    return np.asarray(x1, dtype=float) - coef * np.array([-k, -xi]) * eps**0.75
