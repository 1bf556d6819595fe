"""Power-law fits ``|value| ~ C eps^p`` by least squares in log-log space."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import NonPositiveValues, TooFewPoints

MIN_POINTS = 4


@dataclass(frozen=True)
class ScalingFit:
    observable: str
    eps: tuple
    values: tuple
    slope: float
    log_coefficient: float  # natural log of C
    max_residual: float  # largest |log|value| - fit| over the window
    window: tuple  # indices used

    @property
    def coefficient(self) -> float:
        return float(np.exp(self.log_coefficient))

    def predict(self, eps):
        return self.coefficient * np.asarray(eps, dtype=float) ** self.slope

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d: dict) -> "ScalingFit":
        return cls(
            observable=d["observable"],
            eps=tuple(d["eps"]),
            values=tuple(d["values"]),
            slope=d["slope"],
            log_coefficient=d["log_coefficient"],
            max_residual=d["max_residual"],
            window=tuple(d["window"]),
        )

    def summary(self) -> str:
        lo, hi = self.window[0], self.window[-1]
        return (
            f"{self.observable}: slope {self.slope:.6f}, coefficient {self.coefficient:.6e}, "
            f"max residual {self.max_residual:.3e}, window [{lo}..{hi}] of {len(self.eps)}"
        )


def default_window(eps) -> list[int]:
    """All indices except the one with the largest eps."""
    eps = np.asarray(eps, dtype=float)
    drop = int(np.argmax(eps))
    return [i for i in range(len(eps)) if i != drop]


def fit_power_law(eps, values, observable: str = "value", window=None) -> ScalingFit:
    """Least-squares slope of ``log|value|`` against ``log eps``.

    The sign of ``value`` is ignored (impact times are negative).  Zero,
    non-finite or non-positive-eps points inside the window raise
    ``NonPositiveValues``; fewer than 4 points raise ``TooFewPoints``.
    """
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=float)
    if eps.shape != values.shape or eps.ndim != 1:
        raise ValueError("eps and values must be 1-d arrays of equal length")
    idx = default_window(eps) if window is None else sorted(int(i) for i in window)
    if len(idx) < MIN_POINTS:
        raise TooFewPoints(f"{len(idx)} points in the fit window, need at least {MIN_POINTS}")
    e, v = eps[idx], np.abs(values[idx])
    bad = ~(np.isfinite(v) & (v > 0)) | ~(np.isfinite(e) & (e > 0))
    if bad.any():
        where = [idx[i] for i in np.flatnonzero(bad)]
        raise NonPositiveValues(f"{observable}: zero or non-finite entries at rows {where}")
    lx, ly = np.log(e), np.log(v)
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    return ScalingFit(
        observable=observable,
        eps=tuple(float(x) for x in eps),
        values=tuple(float(x) for x in values),
        slope=float(slope),
        log_coefficient=float(intercept),
        max_residual=float(np.max(np.abs(resid))),
        window=tuple(idx),
    )
