"""Plot-ready output for sweeps: gnuplot data blocks and a log-log chart."""
from __future__ import annotations

from pathlib import Path

import numpy as np

# observables drawn for each sweep kind
SERIES = {
    "delta": ("delta_num", "delta_asym"),
    "zdm": ("delta_num", "shift_zdm", "gap_zdm"),
    "pdm": ("delta_num", "shift_zdm", "gap_zdm", "delta0_num", "shift_pdm", "gap_pdm"),
}


def collect_series(rows, n: int, which: str) -> dict:
    """``{name: (eps, |value|)}`` for the finite, nonzero entries of each series."""
    out = {}
    for name in SERIES[which]:
        pts = []
        for r in rows:
            v = r.csv_values(n).get(name)
            if v is not None and np.isfinite(v) and v != 0 and r.eps > 0:
                pts.append((r.eps, abs(v)))
        if pts:
            e, v = zip(*pts)
            out[name] = (np.array(e), np.array(v))
    return out


def write_gnuplot(path, series: dict) -> Path:
    """One two-column block per series, separated by two blank lines (gnuplot ``index``)."""
    path = Path(path)
    lines = []
    for name, (e, v) in series.items():
        lines.append(f"# {name}")
        lines.append("# eps abs_value")
        lines.extend(f"{a!r} {b!r}" for a, b in zip(e.tolist(), v.tolist()))
        lines.extend(["", ""])
    path.write_text("\n".join(lines), encoding="utf-8")
    return path


def write_figure(path, series: dict, title: str = "") -> Path:
    """Log-log chart of every series; the format follows the file suffix."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    matplotlib.rcParams["svg.hashsalt"] = "grazing-maps"
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    markers = "osd^v<>"
    for i, (name, (e, v)) in enumerate(series.items()):
        ax.loglog(e, v, marker=markers[i % len(markers)], label=name)
    ax.set_xlabel("eps")
    ax.set_ylabel("|value|")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    if series:
        ax.legend()
    # fixed metadata keeps SVG output reproducible
    meta = {"Date": None} if path.suffix.lower() in (".svg", ".pdf") else {}
    fig.savefig(path, metadata=meta)
    plt.close(fig)
    return path
