"""Figures written next to CLI reports. Uses the non-interactive Agg backend."""
from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams.update({"font.size": 11, "axes.grid": True, "grid.alpha": 0.3})


def _closed(v: np.ndarray) -> np.ndarray:
    return np.vstack([v, v[:1]]) if len(v) else v


def region_figure(regions, title: str = "", bounds=None):
    """Overlay rate regions given as ``(label, RateRegion)`` pairs.

    ``bounds`` optionally draws dashed constraint lines as
    ``(r1_max, r2_max, rsum_max)``.
    """
    fig, ax = plt.subplots(figsize=(5.5, 5))
    for k, (label, region) in enumerate(regions):
        v = _closed(region.vertices)
        # later regions dashed so coincident outlines stay visible
        ax.plot(v[:, 0], v[:, 1], "-o" if k == 0 else "--o", ms=3, lw=2.5 if k == 0 else 1.5,
                color=f"C{k}", label=label, clip_on=False)
        if len(region.vertices) >= 3:
            ax.fill(v[:, 0], v[:, 1], color=f"C{k}", alpha=0.12)
    if bounds is not None:
        r1, r2, rs = bounds
        ax.axvline(r1, ls="--", color="0.4", lw=1)
        ax.axhline(r2, ls="--", color="0.4", lw=1)
        x = np.linspace(0, rs, 2)
        ax.plot(x, rs - x, ls=":", color="0.4", lw=1)
    ax.set_xlabel("$R_1$ (Alice, bits/use)")
    ax.set_ylabel("$R_2$ (Bob, bits/use)")
    ax.set_xlim(left=0)
    ax.set_ylim(bottom=0)
    ax.set_aspect("equal", adjustable="box")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=9)
    fig.tight_layout()
    return fig


def error_trend_figure(lengths, means, sems, title: str = ""):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.errorbar(lengths, means, yerr=3 * np.asarray(sems), fmt="-o", capsize=4)
    ax.set_xlabel("block length $L$")
    ax.set_ylabel(r"$\langle P_E \rangle$ (error bars: 3 s.e.)")
    ax.set_xticks(list(lengths))
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig


def figure_bytes(fig) -> bytes:
    buf = io.BytesIO()
    # fixed metadata keeps repeated renders identical
    fig.savefig(buf, format="png", dpi=120, metadata={"Software": None})
    plt.close(fig)
    return buf.getvalue()
