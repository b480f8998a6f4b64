"""Static SVG log-log plots of decay series with fitted lines."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .norms import norm_label  # noqa: E402

# fixed salt and no timestamp keep the SVG bytes reproducible
matplotlib.rcParams["svg.hashsalt"] = "rarefaction2d"
matplotlib.rcParams["svg.fonttype"] = "path"


def decay_plot(path, series, fits=None, title=None):
    """Plot ``value`` against ``1 + t`` on log-log axes.

    ``fits`` maps a series key ``(label, p)`` to a :class:`RateFit` drawn
    as a dashed line over its window.
    """
    fits = fits or {}
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for s in series:
        t, v = s.arrays()
        keep = v > 0
        if not keep.any():
            continue
        name = f"{s.label} (p={norm_label(s.p)})"
        (line,) = ax.loglog(1.0 + t[keep], v[keep], "o-", ms=3, label=name)
        fit = fits.get((s.label, s.p))
        if fit is not None:
            tt = np.geomspace(fit.window[0], fit.window[1], 50)
            ax.loglog(1.0 + tt, fit.predict(tt), "--", color=line.get_color(), label=f"slope {fit.exponent:.3f}")
    ax.set_xlabel("1 + t")
    ax.set_ylabel("norm")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=7)
    ax.grid(True, which="both", lw=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
