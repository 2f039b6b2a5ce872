"""Minimal SVG line charts for sweep CSVs (needs the ``plot`` extra)."""

from __future__ import annotations

import numpy as np


def _wide_positive(a):
    a = a[np.isfinite(a)]
    return a.size > 1 and np.all(a > 0) and a.max() / a.min() > 100


def render_svg(header, rows, path, title=""):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed ids and no timestamp so repeated runs give identical files
    matplotlib.rcParams["svg.hashsalt"] = "flexfet_rx"
    data = np.array([[float(c) for c in r if not isinstance(c, str)] for r in rows])
    x, ys = data[:, 0], data[:, 1:]
    fig, ax = plt.subplots(figsize=(6, 4))
    for j, label in enumerate(header[1:]):
        ax.plot(x, ys[:, j], label=label)
    if _wide_positive(x):
        ax.set_xscale("log")
    if _wide_positive(ys.ravel()):
        ax.set_yscale("log")
    ax.set_xlabel(header[0])
    ax.set_title(title)
    if ys.shape[1] > 1:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
