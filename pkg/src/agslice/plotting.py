"""Figures for CLI reports. Output is byte-stable: fixed hash salt, no date metadata."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "agslice"
matplotlib.rcParams["svg.fonttype"] = "none"

_METADATA = {"svg": {"Date": None, "Creator": None}, "png": {"Software": None}}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fmt = path.suffix.lstrip(".").lower()
    fig.savefig(path, format=fmt, metadata=_METADATA.get(fmt))
    plt.close(fig)
    return path


def polygon_figure(polygon: np.ndarray, title: str, path, samples=None) -> Path:
    """Rank-2 polytope in intrinsic coordinates, optionally with marked points."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    closed = np.vstack([polygon, polygon[:1]])
    ax.fill(closed[:, 0], closed[:, 1], color="#cfe0f3", zorder=1)
    ax.plot(closed[:, 0], closed[:, 1], color="#23507a", lw=1.5, zorder=2)
    ax.scatter(polygon[:, 0], polygon[:, 1], s=14, color="#23507a", zorder=3)
    if samples is not None and len(samples):
        samples = np.asarray(samples)
        ax.scatter(samples[:, 0], samples[:, 1], s=10, color="#c0392b", zorder=4)
    ax.set_aspect("equal")
    ax.set_title(title)
    ax.set_xlabel("y1")
    ax.set_ylabel("y2")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def gap_figure(rows: np.ndarray, s: float, path) -> Path:
    """Supporting-curve gap over the z-disc for one value of ``s``."""
    sel = np.isclose(rows[:, 0], s)
    x, y, g = rows[sel, 1], rows[sel, 2], rows[sel, 3]
    fig, ax = plt.subplots(figsize=(5, 4.2))
    sc = ax.scatter(x, y, c=g, s=9, cmap="viridis", marker="s")
    fig.colorbar(sc, ax=ax, label="gap")
    ax.set_aspect("equal")
    ax.set_title(f"d(-s+z, s+z) - d(-s, s), s = {s:g}")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    return _save(fig, path)


def error_figure(keys, errors, statuses, path) -> Path:
    """Max error per verification check on a log scale."""
    fig, ax = plt.subplots(figsize=(6, 3.2))
    vals = [max(float(e), 1e-18) if np.isfinite(e) else 1.0 for e in errors]
    colors = ["#2e8b57" if s == "PASS" else "#c0392b" for s in statuses]
    ax.bar(list(keys), vals, color=colors)
    ax.set_yscale("log")
    ax.set_xlabel("check")
    ax.set_ylabel("max error")
    ax.set_title("verification sweep")
    fig.tight_layout()
    return _save(fig, path)
