"""Figure rendering for the report path; every figure lands next to its CSV."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGSIZE = (6.4, 4.8)
DPI = 120


def _new_axes(xlabel: str, ylabel: str, title: str):
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return fig, ax


def save_pr_curves(labeled_rows, path: str, title: str = "Differential precision-recall") -> None:
    """One line per labelled curve; rows are (value, precision, recall, n)."""
    fig, ax = _new_axes("differential recall", "differential precision", title)
    for label, rows in labeled_rows:
        live = [(r[2], r[1]) for r in rows if r[3] > 0]
        if not live:
            continue
        recalls, precisions = zip(*live)
        ax.plot(recalls, precisions, marker="o", markersize=3, label=label)
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    fig.savefig(path)
    plt.close(fig)


def save_fdr_tradeoff(labeled_rows, path: str,
                      title: str = "FDR vs number of differences") -> None:
    """Rows are (lambda2, fdr_hat, n_discoveries); x is log-scaled counts."""
    fig, ax = _new_axes("number of differences", "estimated precision (1 - FDR)", title)
    for label, rows in labeled_rows:
        live = [(r[2], 1.0 - r[1]) for r in rows if r[2] > 0]
        if not live:
            continue
        counts, precisions = zip(*live)
        ax.plot(counts, precisions, marker="o", markersize=3, label=label)
    ax.set_xscale("log")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    fig.savefig(path)
    plt.close(fig)


def save_support_panels(thetas, labels, diff_mask, path: str) -> None:
    """Fit-mode report: per-condition supports plus the difference pattern."""
    n = len(thetas) + 1
    fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.4), dpi=DPI)
    for ax, theta, label in zip(axes, thetas, labels):
        ax.matshow(np.asarray(theta) != 0, cmap="Greys")
        ax.set_title(label, fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    axes[-1].matshow(diff_mask, cmap="Reds")
    axes[-1].set_title("differences", fontsize=9)
    axes[-1].set_xticks([])
    axes[-1].set_yticks([])
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_trace(trace, path: str) -> None:
    fig, axes = plt.subplots(2, 1, figsize=(6.4, 6.2), dpi=DPI, sharex=True)
    iters = np.arange(1, len(trace.objective) + 1)
    axes[0].plot(iters, trace.objective)
    axes[0].set_ylabel("objective")
    axes[0].grid(True, alpha=0.3)
    axes[1].semilogy(iters, trace.primal, label="primal")
    axes[1].semilogy(iters, trace.dual, label="dual")
    axes[1].set_xlabel("iteration")
    axes[1].set_ylabel("residual")
    axes[1].grid(True, alpha=0.3)
    axes[1].legend(fontsize=8)
    fig.savefig(path)
    plt.close(fig)
