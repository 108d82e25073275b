"""Figures for the CLI report commands. Always renders to files (Agg)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from zksvm.sensors import CHANNELS, SensorWindow  # noqa: E402


def plot_sizes(reports, path, paper_kb: float | None = 14.0) -> None:
    """Per-vector proof bytes against n, log-scaled on x."""
    ns = [r.n for r in reports]
    kb = [r.bytes_per_vector / 1024 for r in reports]
    pts = [r.points_per_vector for r in reports]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax1.plot(ns, kb, "o-", color="tab:blue", label="this build")
    if paper_kb is not None:
        ax1.axhline(paper_kb, ls="--", color="gray", lw=1, label=f"reference {paper_kb:g} KB")
    ax1.set_xscale("log", base=2)
    ax1.set_xlabel("vector length n")
    ax1.set_ylabel("KB per vector")
    ax1.legend(frameon=False, fontsize=8)
    ax2.plot(ns, pts, "s-", color="tab:orange", label="points")
    ax2.plot(ns, [r.scalars_per_vector for r in reports], "^-", color="tab:green", label="scalars")
    ax2.set_xscale("log", base=2)
    ax2.set_yscale("log")
    ax2.set_xlabel("vector length n")
    ax2.set_ylabel("elements per vector")
    ax2.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_window(w: SensorWindow, path) -> None:
    """Six channels with the touch and release marks."""
    t = [x - w.touch_start for x in w.timestamps]
    fig, axes = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    for ch, name in enumerate(CHANNELS):
        ax = axes[0] if name.startswith("accel") else axes[1]
        ax.plot(t, w.channel(ch), lw=1, label=name.split("_")[1])
    for ax, unit in zip(axes, ("accel (m/s²)", "gyro (rad/s)")):
        ax.axvline(0.0, color="k", lw=0.8, ls=":")
        ax.axvline(w.release - w.touch_start, color="tab:red", lw=0.8, ls="--")
        ax.set_ylabel(unit)
        ax.legend(frameon=False, fontsize=8, ncol=3)
    axes[1].set_xlabel("time from touch (ms); dashed: release")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
