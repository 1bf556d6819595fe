"""Command-line front end (``grazing-maps``)."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dmaps import delta_asymptotic, pdm_analytic, pdm_numeric, zdm_analytic, zdm_numeric
from .errors import GrazingMapsError, NonPositiveValues, TooFewPoints
from .fitting import fit_power_law
from .flow import DEFAULT_TOL, first_crossing
from .grazing import classify, pi3_point
from .plotting import collect_series, write_figure, write_gnuplot
from .report import eps_grid, failure_exceeded, new_report, read_csv_column, rows_to_csv, run_sweep
from .systems import DESCRIPTIONS, NAMES, load_system

EXIT_OK, EXIT_USAGE, EXIT_GATE, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _floats(text: str, what: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")], dtype=float)
    except ValueError:
        raise UsageError(f"bad {what} '{text}': expected comma-separated numbers") from None


def _params(pairs) -> dict:
    out = {}
    for p in pairs or ():
        name, sep, value = p.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"bad --param '{p}': expected name=value")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"bad --param '{p}': '{value}' is not a number") from None
    return out


def _eps_range(text: str, n: int) -> np.ndarray:
    lo, sep, hi = text.partition(":")
    try:
        lo_f = float(lo)
        hi_f = float(hi) if sep else lo_f
    except ValueError:
        raise UsageError(f"bad --eps '{text}': expected a or a:b") from None
    if lo_f < 0 or hi_f < 0:
        raise UsageError("eps must be non-negative")
    if lo_f > hi_f:
        lo_f, hi_f = hi_f, lo_f
    try:
        return eps_grid(lo_f, hi_f, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _single_eps(text: str) -> float:
    try:
        e = float(text)
    except ValueError:
        raise UsageError(f"bad --eps '{text}': expected one number") from None
    if e < 0:
        raise UsageError("eps must be non-negative")
    return e


def _load(args):
    try:
        system, ref = load_system(args.system, _params(args.param))
    except KeyError as exc:
        raise UsageError(f"unknown parameter {exc}") from None
    return system, ref


def _tol(args):
    return (args.tol_abs, args.tol_rel)


def _grazing_point(args, system):
    if args.point is None:
        return np.zeros(system.dim)
    p = _floats(args.point, "--point")
    if p.size != system.dim:
        raise UsageError(f"--point has {p.size} coordinates, system has dimension {system.dim}")
    return p


def _emit_json(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _gate(system, xstar):
    """Order-4 classification of x*; returns the report or None (message printed)."""
    report = classify(system, xstar)
    if not report.is_order4:
        print(f"classification gate failed at {xstar.tolist()}: {report.summary()}", file=sys.stderr)
        return None
    return report


# -- subcommands --------------------------------------------------------

def cmd_list_systems(args) -> int:
    if args.json:
        _emit_json({name: DESCRIPTIONS[name] for name in NAMES})
    else:
        for name in NAMES:
            print(f"{name:20s} {DESCRIPTIONS[name]}")
    return EXIT_OK


def cmd_classify(args) -> int:
    system, _ = _load(args)
    x = _grazing_point(args, system)
    report = classify(system, x)
    if args.json:
        d = {k: getattr(report, k) for k in report.__dataclass_fields__}
        d["summary"] = report.summary()
        _emit_json(d)
    else:
        print(report.summary())
        for k, v in enumerate(report.lie_values, start=1):
            print(f"  L_X^{k} H = {v:.12g}")
        print(f"  transversality (grad L_X^3 H . X) = {report.transversality_value:.12g}")
    return EXIT_OK if report.is_order4 else EXIT_GATE


def cmd_single(args) -> int:
    """zdm, pdm and delta at one eps."""
    system, ref = _load(args)
    xstar = _grazing_point(args, system)
    if _gate(system, xstar) is None:
        return EXIT_GATE
    eps = _single_eps(args.eps)
    tol = _tol(args)
    if args.x1 is not None:
        x1 = _floats(args.x1, "--x1")
        if x1.size != system.dim:
            raise UsageError(f"--x1 has {x1.size} coordinates, system has dimension {system.dim}")
    else:
        x1 = pi3_point(system, eps, grazing_point=xstar).state
    out = {"system": ref, "eps": eps, "x1": x1.tolist()}
    if args.command == "delta":
        asym = delta_asymptotic(system, eps, xstar)
        if eps == 0:
            num = 0.0
        else:
            num = first_crossing(system, x1, "H", "backward", 10.0 * abs(asym), tol).time
        out.update(delta_num=num, delta_asym=asym)
        lines = [f"delta_num  = {num!r}", f"delta_asym = {asym!r}"]
    else:
        if args.command == "zdm":
            num = zdm_numeric(system, x1, eps, tol, grazing_point=xstar)
            ana = zdm_analytic(system, x1, eps, xstar, check=False)
            key = "x4"
        else:
            num = pdm_numeric(system, x1, eps, tol, grazing_point=xstar)
            ana = pdm_analytic(system, x1, eps, xstar, check=False)
            key = "x5"
        gap = float(np.linalg.norm(getattr(num, key) - getattr(ana, key)))
        out.update(numeric=num.to_dict(), analytic=ana.to_dict(), gap=gap)
        lines = [
            f"x1         = {x1.tolist()}",
            f"delta      = {num.delta!r}",
            f"v          = {num.v!r}",
            f"{key}_num     = {getattr(num, key).tolist()}",
            f"{key}_asym    = {getattr(ana, key).tolist()}",
            f"gap        = {gap!r}",
        ]
        if key == "x5":
            lines.insert(4, f"delta0     = {num.delta0!r}")
            lines.append(f"L_X^3 H(x5) = {num.l3_residual!r}")
    if args.json:
        _emit_json(out)
    else:
        print("\n".join(lines))
    return EXIT_OK


def cmd_sweep(args) -> int:
    system, ref = _load(args)
    xstar = _grazing_point(args, system)
    if _gate(system, xstar) is None:
        return EXIT_GATE
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    grid = _eps_range(args.eps, args.n)
    tol = _tol(args)
    rows = run_sweep(system, grid, args.map, tol, grazing_point=xstar)
    report = new_report(system, ref, f"sweep --map {args.map}", tol, grazing_point=xstar.tolist(), map=args.map)
    report.rows = rows
    series = collect_series(rows, system.dim, args.map)
    for name, (e, v) in series.items():
        try:
            report.fits.append(fit_power_law(e, v, name))
        except (TooFewPoints, NonPositiveValues):
            pass
    text = rows_to_csv(rows, system.dim)

    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="utf-8")
        out.with_suffix(".json").write_text(report.to_json(), encoding="utf-8")
        write_gnuplot(out.with_suffix(".dat"), series)
        if args.plot != "none":
            write_figure(out.with_suffix(f".{args.plot}"), series, f"{ref}: {args.map}")
    if args.json:
        sys.stdout.write(report.to_json())
    elif not args.out:
        sys.stdout.write(text)

    failed = [r for r in rows if r.failed]
    for r in failed:
        print(f"eps={r.eps!r}: {r.error}", file=sys.stderr)
    if failure_exceeded(rows):
        print(f"{len(failed)} of {len(rows)} rows failed", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        eps, values = read_csv_column(args.csv, args.column)
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv}: {exc}") from None
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    window = None
    if args.all:
        window = list(range(len(eps)))
    fit = fit_power_law(eps, values, args.column, window)
    if args.json:
        _emit_json(fit.to_dict())
    else:
        print(fit.summary())
    return EXIT_OK


# -- parser -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grazing-maps",
        description="Discontinuity mappings near order-4 grazing points.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, system=True):
        p.add_argument("--json", action="store_true", help="print a JSON report")
        if system:
            p.add_argument("--system", required=True, help="built-in name or path to a system file")
            p.add_argument("--param", action="append", metavar="NAME=VALUE", help="override a parameter (repeatable)")
            p.add_argument("--tol-abs", type=float, default=DEFAULT_TOL[0])
            p.add_argument("--tol-rel", type=float, default=DEFAULT_TOL[1])

    p = sub.add_parser("list-systems", help="list the built-in systems")
    common(p, system=False)
    p.set_defaults(func=cmd_list_systems)

    p = sub.add_parser("classify", help="classify a point of the boundary")
    common(p)
    p.add_argument("--point", help="comma-separated coordinates (default: origin)")
    p.set_defaults(func=cmd_classify)

    for name, helptext in (
        ("zdm", "zero-time discontinuity map at one eps"),
        ("pdm", "Poincare discontinuity map at one eps"),
        ("delta", "impact time at one eps"),
    ):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--point", help="grazing point x* (default: origin)")
        p.add_argument("--eps", required=True, help="depth below the boundary")
        p.add_argument("--x1", help="input point (default: the point of Pi_3 at depth eps)")
        p.set_defaults(func=cmd_single)

    p = sub.add_parser("sweep", help="run a map over a log-spaced eps grid")
    common(p)
    p.add_argument("--map", choices=("zdm", "pdm", "delta"), default="pdm")
    p.add_argument("--point", help="grazing point x* (default: origin)")
    p.add_argument("--eps", default="1e-8:1e-4", help="a:b (log-spaced) or a single value")
    p.add_argument("--n", type=int, default=9, help="number of eps points")
    p.add_argument("--out", help="CSV path; .json, .dat and the figure are written alongside")
    p.add_argument("--plot", choices=("svg", "png", "none"), default="svg", help="figure format with --out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit a power law to a sweep CSV column")
    common(p, system=False)
    p.add_argument("csv", help="CSV written by sweep")
    p.add_argument("--column", required=True)
    p.add_argument("--all", action="store_true", help="include the largest eps in the fit window")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GrazingMapsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
