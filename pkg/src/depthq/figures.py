"""Report figures: dataset-level PR and F-measure curves as PNG files.

Rendering uses the Agg backend so it works headless, and avoids any
timestamped metadata so repeated runs emit identical bytes.
"""

from __future__ import annotations

import os

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

__all__ = ["render_report_figures"]


def render_report_figures(
    out_dir: str | os.PathLike,
    dataset: str,
    precision: np.ndarray,
    recall: np.ndarray,
    f: np.ndarray,
) -> list[str]:
    """Write pr_curve.png and f_curve.png from threshold-indexed aggregates.

    The three arrays hold the per-threshold dataset means (index = integer
    threshold 0..255). Returns the written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(5.0, 4.0), dpi=110)
    ax.plot(recall, precision, color="#c0392b", linewidth=1.8)
    ax.set_xlabel("Recall")
    ax.set_ylabel("Precision")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, linewidth=0.4, alpha=0.6)
    ax.set_title(f"PR curve: {dataset}")
    fig.tight_layout()
    path = os.path.join(out_dir, "pr_curve.png")
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    thresholds = np.arange(f.shape[0])
    fig, ax = plt.subplots(figsize=(5.0, 4.0), dpi=110)
    ax.plot(thresholds, f, color="#2c3e50", linewidth=1.8)
    ax.set_xlabel("Threshold")
    ax.set_ylabel("F-measure")
    ax.set_xlim(0, 255)
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, linewidth=0.4, alpha=0.6)
    ax.set_title(f"F vs threshold: {dataset}")
    fig.tight_layout()
    path = os.path.join(out_dir, "f_curve.png")
    fig.savefig(path)
    plt.close(fig)
    written.append(path)
    return written
