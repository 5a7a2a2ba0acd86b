"""Figures written next to the CSV reports."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _variogram_axes(ax, x, estimate, truth_fn, xlabel):
    gamma = np.atleast_2d(estimate.gamma)
    for g in gamma:
        ax.plot(x, g, color="0.75", lw=0.6)
    ax.plot(x, gamma.mean(axis=0), "k-.", marker="o", ms=2.5, lw=0.9, label="mean estimate")
    if truth_fn is not None:
        fine = np.linspace(x.min(), x.max(), 400) if x.size > 1 else x
        ax.plot(fine, truth_fn(fine), "k-", lw=1.2, label="model")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("variogram")
    ax.legend(frameon=False)


def variogram_figure(path, estimate, model=None, title=None):
    """Replicate curves in grey, their mean dash-dotted, model curve in black.

    Space-time estimates get two panels: the zero-time-lag spatial margin and
    the coincident-location temporal margin.
    """
    with plt.rc_context(STYLE):
        if estimate.u is None:
            fig, ax = plt.subplots(figsize=(4.5, 3.2))
            truth_fn = None if model is None else model.variogram
            _variogram_axes(ax, estimate.theta, estimate, truth_fn, "geodesic distance (rad)")
            axes = [ax]
        else:
            fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.2))
            sm, tm = estimate.spatial_margin(), estimate.temporal_margin()
            f_s = None if model is None else (lambda th: model.variogram(th, 0.0))
            f_t = None if model is None else (lambda u: model.variogram(0.0, u))
            _variogram_axes(axes[0], sm.theta, sm, f_s, "geodesic distance (rad)")
            axes[0].set_title("spatial margin")
            _variogram_axes(axes[1], tm.u, tm, f_t, "time lag")
            axes[1].set_title("temporal margin")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)


def benchmark_figure(path, rows, methods):
    """Log-log wall time per method against the number of grid points."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        for method, marker in zip(methods, "osd^v"):
            pts = [(r["n"], r[method]) for r in rows if r.get(method) is not None]
            if pts:
                n, t = zip(*pts)
                ax.loglog(n, t, marker=marker, label=method)
        ax.set_xlabel("grid points N*M")
        ax.set_ylabel("factor + sample time (s)")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
