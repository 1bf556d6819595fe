"""Epsilon sweeps, CSV rows and the JSON run report."""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dmaps import (
    DmResult,
    delta0_asymptotic,
    delta_asymptotic,
    pdm_analytic,
    pdm_numeric,
    v_leading,
    zdm_analytic,
    zdm_numeric,
)
from .errors import GrazingMapsError
from .fitting import ScalingFit
from .flow import DEFAULT_TOL, first_crossing
from .grazing import pi3_point
from .lie import lie_derivatives
from .sysdsl import ExpressionSystem, format_system

MAPS = ("delta", "zdm", "pdm")
FAILURE_FRACTION = 0.2
THREADS_ENV = "GRAZING_MAPS_THREADS"


def csv_columns(n: int) -> list[str]:
    def vec(name):
        return [f"{name}_{i}" for i in range(1, n + 1)]

    return (
        ["eps", *vec("x1"), "delta_num", "delta_asym", "v_num", "v_asym"]
        + vec("x4_num") + vec("x4_asym") + ["gap_zdm", "delta0_num", "delta0_asym"]
        + vec("x5_num") + vec("x5_asym") + ["gap_pdm"]
        # extras, after the fixed block
        + ["shift_zdm", "shift_pdm", "h_residual", "l3_residual", "lie1_x1", "lie2_x1", "error"]
    )


@dataclass
class SweepRow:
    eps: float
    x1: np.ndarray | None = None
    numeric: DmResult | None = None
    analytic: DmResult | None = None
    delta_asym: float | None = None
    v_asym: float | None = None
    delta0_asym: float | None = None
    lie1_x1: float | None = None
    lie2_x1: float | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "x1": None if self.x1 is None else self.x1.tolist(),
            "numeric": None if self.numeric is None else self.numeric.to_dict(),
            "analytic": None if self.analytic is None else self.analytic.to_dict(),
            "delta_asym": self.delta_asym,
            "v_asym": self.v_asym,
            "delta0_asym": self.delta0_asym,
            "lie1_x1": self.lie1_x1,
            "lie2_x1": self.lie2_x1,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepRow":
        return cls(
            eps=d["eps"],
            x1=None if d["x1"] is None else np.array(d["x1"], dtype=float),
            numeric=_dm_from_dict(d["numeric"]),
            analytic=_dm_from_dict(d["analytic"]),
            delta_asym=d["delta_asym"],
            v_asym=d["v_asym"],
            delta0_asym=d["delta0_asym"],
            lie1_x1=d["lie1_x1"],
            lie2_x1=d["lie2_x1"],
            error=d["error"],
        )

    def csv_values(self, n: int) -> dict:
        num, ana = self.numeric, self.analytic
        row = {"eps": self.eps}

        def put_vec(name, v):
            for i in range(n):
                row[f"{name}_{i + 1}"] = None if v is None else float(v[i])

        def attr(obj, name):
            return None if obj is None else getattr(obj, name)

        def dist(a, b):
            if a is None or b is None:
                return None
            return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))

        put_vec("x1", self.x1)
        row["delta_num"] = attr(num, "delta")
        row["delta_asym"] = self.delta_asym
        row["v_num"] = attr(num, "v")
        row["v_asym"] = self.v_asym
        put_vec("x4_num", attr(num, "x4"))
        put_vec("x4_asym", attr(ana, "x4"))
        row["gap_zdm"] = dist(attr(num, "x4"), attr(ana, "x4"))
        row["delta0_num"] = attr(num, "delta0")
        row["delta0_asym"] = self.delta0_asym
        put_vec("x5_num", attr(num, "x5"))
        put_vec("x5_asym", attr(ana, "x5"))
        row["gap_pdm"] = dist(attr(num, "x5"), attr(ana, "x5"))
        row["shift_zdm"] = dist(attr(num, "x4"), self.x1)
        row["shift_pdm"] = dist(attr(num, "x5"), self.x1)
        row["h_residual"] = attr(num, "h_residual")
        row["l3_residual"] = attr(num, "l3_residual")
        row["lie1_x1"] = self.lie1_x1
        row["lie2_x1"] = self.lie2_x1
        row["error"] = self.error
        return row


def _dm_from_dict(d):
    if d is None:
        return None
    d = dict(d)
    for k in ("x1", "x2", "x3", "x4", "x5"):
        if d.get(k) is not None:
            d[k] = np.array(d[k], dtype=float)
    return DmResult(**d)


def eps_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """Log-spaced grid from lo to hi; a single point when n == 1 or lo == hi."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1 or lo == hi:
        return np.array([float(lo)])
    if lo <= 0 or hi <= 0:
        raise ValueError("a log-spaced eps range needs positive endpoints")
    grid = np.logspace(np.log10(lo), np.log10(hi), n)
    grid[0], grid[-1] = lo, hi  # logspace rounds the endpoints
    return grid


def sweep_row(
    system: ExpressionSystem,
    eps: float,
    which: str = "pdm",
    tol=DEFAULT_TOL,
    params=None,
    grazing_point=None,
) -> SweepRow:
    """One row: x1 on Pi_3 at depth eps, then the numeric and analytic maps."""
    if which not in MAPS:
        raise ValueError(f"map must be one of {MAPS}")
    params = system.resolve_params(params)
    row = SweepRow(eps=float(eps))
    try:
        x1 = pi3_point(system, eps, grazing_point=grazing_point, params=params).state
        row.x1 = x1
        lie = lie_derivatives(system, x1, 2, params).values
        row.lie1_x1, row.lie2_x1 = float(lie[1]), float(lie[2])
        row.delta_asym = delta_asymptotic(system, eps, grazing_point, params)
        row.v_asym = v_leading(system, eps, grazing_point, params)
        if which == "delta":
            if eps == 0:
                row.numeric = DmResult("numeric", 0.0, x1, delta=0.0, t_impact=0.0, h_residual=0.0)
            else:
                hit = first_crossing(system, x1, "H", "backward", 10.0 * abs(row.delta_asym), tol, params)
                row.numeric = DmResult("numeric", float(eps), x1, delta=hit.time, x2=hit.state,
                                       t_impact=hit.time, h_residual=hit.residual)
        elif which == "zdm":
            row.numeric = zdm_numeric(system, x1, eps, tol, params, grazing_point=grazing_point)
            row.analytic = zdm_analytic(system, x1, eps, grazing_point, params, check=False)
        else:
            row.delta0_asym = delta0_asymptotic(system, x1, eps, grazing_point, params)
            row.numeric = pdm_numeric(system, x1, eps, tol, params, grazing_point=grazing_point)
            row.analytic = pdm_analytic(system, x1, eps, grazing_point, params, check=False)
    except (GrazingMapsError, ArithmeticError, ValueError) as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def thread_count(n_rows: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            pass
    return max(1, min(limit, n_rows))


def run_sweep(system, eps_values, which="pdm", tol=DEFAULT_TOL, params=None, grazing_point=None) -> list[SweepRow]:
    """Compute rows concurrently; the result is ordered by eps."""
    eps_values = sorted(float(e) for e in eps_values)
    workers = thread_count(len(eps_values))

    def one(e):
        return sweep_row(system, e, which, tol, params, grazing_point)

    if workers == 1:
        return [one(e) for e in eps_values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, eps_values))


def failure_exceeded(rows) -> bool:
    return sum(r.failed for r in rows) > FAILURE_FRACTION * len(rows)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return repr(float(v))


def rows_to_csv(rows, n: int) -> str:
    cols = csv_columns(n)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        vals = r.csv_values(n)
        w.writerow([_cell(vals[c]) for c in cols])
    return buf.getvalue()


def read_csv_column(path, column: str):
    """Return (eps, values) from a sweep CSV; blank cells become NaN."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise KeyError(f"column '{column}' not in {path}")
        if "eps" not in reader.fieldnames:
            raise KeyError(f"column 'eps' not in {path}")
        eps, vals = [], []
        for rec in reader:
            eps.append(float(rec["eps"]) if rec["eps"] else np.nan)
            vals.append(float(rec[column]) if rec[column] else np.nan)
    return np.array(eps), np.array(vals)


@dataclass
class RunReport:
    system: str  # name or path as given
    source: str  # canonical DSL text
    parameters: dict
    command: str
    tolerances: dict
    version: str
    rows: list = field(default_factory=list)  # SweepRow
    fits: list = field(default_factory=list)  # ScalingFit
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "source": self.source,
            "parameters": dict(self.parameters),
            "command": self.command,
            "tolerances": dict(self.tolerances),
            "version": self.version,
            "rows": [r.to_dict() for r in self.rows],
            "fits": [f.to_dict() for f in self.fits],
            "extra": self.extra,
        }

    def to_json(self) -> str:
        # repr-based float output round-trips exactly; sorted keys keep it byte-stable
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(
            system=d["system"],
            source=d["source"],
            parameters=dict(d["parameters"]),
            command=d["command"],
            tolerances=dict(d["tolerances"]),
            version=d["version"],
            rows=[SweepRow.from_dict(r) for r in d["rows"]],
            fits=[ScalingFit.from_dict(f) for f in d["fits"]],
            extra=dict(d.get("extra", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def new_report(system: ExpressionSystem, ref: str, command: str, tol, params=None, **extra) -> RunReport:
    from . import __version__

    return RunReport(
        system=ref,
        source=format_system(system),
        parameters=system.resolve_params(params),
        command=command,
        tolerances={"abs": tol[0], "rel": tol[1]},
        version=__version__,
        extra=extra,
    )
