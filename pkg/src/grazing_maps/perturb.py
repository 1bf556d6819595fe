"""Roots of ``eps*f + g`` near a root of ``g`` of multiplicity m.

If ``g`` has a root ``d`` of multiplicity ``m``, the perturbed equation
``eps*f(x) + g(x) = 0`` has m roots

    d + (-eps * m! * f(d) / g^(m)(d))^(1/m) * exp(2 pi i k / m),  k = 0..m-1

to leading order.  For ``m = 1`` this is ``d - eps*f(d)/g'(d)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import NoSignChange, NotAMultiplicityMRoot, ZeroLeadingDerivative

ROOT_TOL = 1e-9


@dataclass(frozen=True)
class PerturbedRootFamily:
    base_root: float
    multiplicity: int
    eps: float
    roots: tuple  # complex for m > 1, float for m = 1

    @property
    def real_roots(self) -> list[float]:
        return sorted(r.real for r in self.roots if abs(complex(r).imag) <= 1e-15 * max(1.0, abs(r)))


def root_of_unity(k: int, m: int) -> complex:
    """``exp(2 pi i k/m)``, exact at quarter turns."""
    quarter, rem = divmod(4 * k, m)
    if rem == 0:
        return (1, 1j, -1, -1j)[quarter % 4]
    return cmath.exp(2j * math.pi * k / m)


def perturbed_roots(
    f: Callable[[float], float],
    g: Callable[[float], float] | None,
    g_derivs: Callable[[float, int], Sequence[float]],
    base_root: float,
    m: int,
    eps: float,
) -> PerturbedRootFamily:
    """Leading-order root family of ``eps*f + g``.

    ``g_derivs(x, m)`` returns ``[g(x), g'(x), ..., g^(m)(x)]``.  ``g``
    itself is only used to double-check the root when given.
    """
    if m < 1:
        raise ValueError("multiplicity must be >= 1")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    derivs = list(g_derivs(base_root, m))
    if len(derivs) < m + 1:
        raise ValueError(f"g_derivs returned {len(derivs)} values, need {m + 1}")
    if g is not None:
        derivs[0] = g(base_root)
    for j in range(m):
        if abs(derivs[j]) > ROOT_TOL:
            raise NotAMultiplicityMRoot(f"g^({j})({base_root}) = {derivs[j]:.3e} does not vanish")
    gm = derivs[m]
    if gm == 0:
        raise ZeroLeadingDerivative(f"g^({m})({base_root}) = 0")
    radicand = -eps * math.factorial(m) * f(base_root) / gm
    if m == 1:
        return PerturbedRootFamily(base_root, 1, eps, (base_root + radicand,))
    principal = complex(radicand) ** (1.0 / m)
    if radicand > 0:
        principal = complex(radicand ** (1.0 / m))
    roots = tuple(base_root + principal * root_of_unity(k, m) for k in range(m))
    return PerturbedRootFamily(base_root, m, eps, roots)


def brute_root_oracle(h: Callable[[float], float], bracket: tuple[float, float]) -> float:
    """Plain bisection on a sign-changing bracket, run to adjacent doubles.

    Stops once the bracket is narrower than 1e-14 and its midpoint no
    longer differs from an endpoint.
    """
    a, b = map(float, bracket)
    fa, fb = h(a), h(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa > 0) == (fb > 0):
        raise NoSignChange(f"h({a}) and h({b}) have the same sign")
    while True:
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        fm = h(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return a if abs(fa) <= abs(h(b)) else b
