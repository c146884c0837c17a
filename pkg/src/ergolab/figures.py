"""Matplotlib renderings of computed laws, written next to the exact output.

Figures are derived float views for humans; the JSON/CSV artifacts remain
the exact interface. PNG metadata is pinned so renders are reproducible.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_PNG_METADATA = {"Software": "ergolab"}


def _step_points(measure, pad=0.5):
    xs, ys = [], []
    total = 0.0
    values = [float(v) for v, _ in measure.atoms]
    lo = min(values) - pad
    hi = max(values) + pad
    xs.append(lo)
    ys.append(0.0)
    for v, m in measure.atoms:
        xs.append(float(v))
        ys.append(total)
        total += float(m)
        xs.append(float(v))
        ys.append(total)
    xs.append(hi)
    ys.append(1.0)
    return xs, ys


def save_cdf_figure(path, measures, title):
    """Overlayed CDF step plots; `measures` is a list of (label, measure)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, measure in measures:
        xs, ys = _step_points(measure)
        ax.plot(xs, ys, drawstyle="default", label=label, linewidth=1.4)
    ax.set_xlabel("t")
    ax.set_ylabel("F(t)")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)
