"""Figure rendering for the CLI report path.

Every experiment writes its delimited results first; these helpers render
companion PNG figures from the same row dictionaries, so plots can always
be regenerated from the files alone.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STYLE = {
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 8,
}


def _new_axes(ncols=1, width=4.2, height=2.8):
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, ncols, figsize=(width * ncols, height))
    return fig, axes


def save_solve_figure(x_hat: np.ndarray, trace, path) -> None:
    fig, (ax0, ax1) = _new_axes(2)
    ax0.stem(np.abs(np.asarray(x_hat)), markerfmt=" ", basefmt="k-")
    ax0.set_xlabel("weight index")
    ax0.set_ylabel("|x_hat|")
    ax1.plot(range(1, len(trace) + 1), trace, marker="o", ms=3)
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("objective")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_threshold_figure(rows, path) -> None:
    """One panel per block size; RMS amplitude versus the data scale."""
    sizes = sorted({r["d"] for r in rows})
    fig, axes = _new_axes(len(sizes))
    if len(sizes) == 1:
        axes = [axes]
    for ax, d in zip(axes, sizes):
        sub = [r for r in rows if r["d"] == d]
        for prior in sorted({r["prior"] for r in sub}):
            pts = [(r["alpha"], r["rms"]) for r in sub if r["prior"] == prior]
            pts.sort()
            style = {"ls": "--", "color": "0.5"} if prior == "hard" else {}
            ax.plot(*zip(*pts), label=prior, **style)
        ax.set_title(f"block size {d}")
        ax.set_xlabel("alpha")
        ax.set_ylabel("RMS amplitude")
        ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_synth_figure(rows, oracle_nmse, path) -> None:
    fig, (ax0, ax1) = _new_axes(2)
    trials = [r["trial"] for r in rows]
    ax0.semilogy(trials, [r["nmse"] for r in rows], ".", label="solver")
    ax0.semilogy(trials, [r["nmse_oracle"] for r in rows], "x", ms=3, label="oracle")
    if oracle_nmse is not None:
        ax0.axhline(oracle_nmse, color="0.5", ls="--", lw=0.8)
    ax0.set_xlabel("trial")
    ax0.set_ylabel("NMSE")
    ax0.legend()
    its = [r["iterations"] for r in rows]
    ax1.hist(its, bins=range(1, max(its) + 2), align="left", rwidth=0.8)
    ax1.set_xlabel("iterations to convergence")
    ax1.set_ylabel("trials")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_doa_figure(curves, path) -> None:
    """OSPA versus array SNR, one line per scenario case."""
    fig, ax = _new_axes(1)
    for label in sorted(curves):
        pts = sorted(curves[label])
        ax.plot(*zip(*pts), marker="o", ms=3, label=label)
    ax.set_xlabel("array SNR (dB)")
    ax.set_ylabel("mean OSPA (deg)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
