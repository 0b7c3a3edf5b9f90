"""Matplotlib rendering for CLI reports: matrix heatmaps and defect charts."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .tensor import Morphism

__all__ = ["save_morphism_heatmap", "save_defect_bars", "save_morphism_csv"]


def save_morphism_heatmap(m: Morphism, path, title: str = "") -> Path:
    """Side-by-side real/imaginary heatmaps of a morphism's matrix."""
    path = Path(path)
    fig, axes = plt.subplots(1, 2, figsize=(8, 4))
    vmax = max(np.max(np.abs(m.mat.real)), np.max(np.abs(m.mat.imag)), 1e-12)
    for ax, part, name in ((axes[0], m.mat.real, "Re"), (axes[1], m.mat.imag, "Im")):
        im = ax.imshow(part, cmap="RdBu_r", vmin=-vmax, vmax=vmax)
        ax.set_title(f"{name} {title}".strip())
        ax.set_xlabel(f"dom {list(m.dom.factors)}")
        ax.set_ylabel(f"cod {list(m.cod.factors)}")
    fig.colorbar(im, ax=axes, shrink=0.8)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_defect_bars(values: dict[str, float], path, title: str = "",
                     threshold: float | None = None) -> Path:
    """Log-scale bar chart of named defect values."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    names = list(values)
    vals = [max(values[n], 1e-18) for n in names]
    ax.bar(range(len(names)), vals)
    ax.set_yscale("log")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right")
    if threshold is not None:
        ax.axhline(threshold, color="red", linestyle="--", label=f"tol {threshold:g}")
        ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_morphism_csv(m: Morphism, path) -> Path:
    """Row-major matrix entries as (row, col, re, im) records."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "re", "im"])
        for r in range(m.mat.shape[0]):
            for c in range(m.mat.shape[1]):
                w.writerow([r, c, repr(m.mat[r, c].real), repr(m.mat[r, c].imag)])
    return path
