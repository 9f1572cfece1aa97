"""Static figure of a response run: strain and stress against time."""

from __future__ import annotations

from pathlib import Path

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .response import ResponseSeries


def plot_series(series: ResponseSeries, path: Path | str, title: str | None = None, dpi: int = 120) -> Path:
    """Write a two-panel PNG (``eps`` above ``sigma``) and return its path."""
    fig = Figure(figsize=(7.0, 5.0), layout="constrained")
    FigureCanvasAgg(fig)
    ax_e, ax_s = fig.subplots(2, 1, sharex=True)
    ax_e.plot(series.t, series.eps, lw=1.0, color="tab:blue")
    ax_e.set_ylabel(r"strain $\varepsilon(t)$")
    ax_s.plot(series.t, series.sigma, lw=1.0, color="tab:red")
    ax_s.set_ylabel(r"stress $\sigma(t)$")
    ax_s.set_xlabel("t")
    for ax in (ax_e, ax_s):
        ax.axhline(0.0, color="0.6", lw=0.5)
        ax.grid(alpha=0.3)
    if title:
        ax_e.set_title(title)
    path = Path(path)
    fig.savefig(path, dpi=dpi, metadata={"Software": None})
    return path
