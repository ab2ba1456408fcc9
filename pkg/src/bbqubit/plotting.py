"""Minimal static SVG line charts."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "bbqubit"


def line_chart(path, panels, xlabel: str, ylabel: str, ylim=(0.45, 1.02)):
    """Write side-by-side panels of line series to an SVG file.

    ``panels`` is a list of ``(title, [(label, xs, ys, style), ...])``.
    """
    fig, axes = plt.subplots(1, len(panels), figsize=(5 * len(panels), 4), sharey=True, squeeze=False)
    for ax, (title, series) in zip(axes[0], panels):
        for label, xs, ys, style in series:
            ax.plot(xs, ys, style, label=label, lw=1.2, ms=3)
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylim(*ylim)
        ax.grid(alpha=0.3)
        ax.legend(fontsize=7)
    axes[0][0].set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
