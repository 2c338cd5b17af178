"""Figures saved straight to files (Agg backend, nothing is shown)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_pattern(pattern, path, title: str | None = None, size: float = 0.3):
    """Scatter of a 2-D pattern in its final domain."""
    if pattern.ndim != 2:
        raise ValueError("only 2-D patterns can be plotted")
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(pattern.points[:, 0], pattern.points[:, 1], s=size, c="k", linewidths=0)
    ax.set_xlim(pattern.domain.lo[0], pattern.domain.hi[0])
    ax.set_ylim(pattern.domain.lo[1], pattern.domain.hi[1])
    ax.set_aspect("equal")
    ax.set_xlabel("$k_x$")
    ax.set_ylabel("$k_y$")
    ax.set_title(title or f"{pattern.meta.algorithm}, {len(pattern)} points")
    return _save(fig, path)


def plot_mask(mask, path, title: str | None = None):
    occ = np.asarray(getattr(mask, "occupancy", mask))
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(occ.T, origin="lower", cmap="gray_r", interpolation="nearest")
    ax.set_title(title or f"{int(occ.sum())} / {occ.size} cells")
    ax.set_xticks([])
    ax.set_yticks([])
    return _save(fig, path)


def plot_voronoi_profiles(profiles: dict, path, max_points: int = 20_000, seed: int = 0):
    """Area vs. distance, one colour per named profile list."""
    from .analysis import _pool

    rng = np.random.default_rng(seed)
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, prof in profiles.items():
        dist, area, _, _ = _pool(prof)
        if dist.size > max_points:
            pick = rng.choice(dist.size, max_points, replace=False)
            dist, area = dist[pick], area[pick]
        ax.scatter(dist, area, s=1, alpha=0.4, label=name, linewidths=0)
    ax.set_yscale("log")
    ax.set_xlabel("distance from origin")
    ax.set_ylabel("Voronoi cell area")
    ax.legend(markerscale=8)
    return _save(fig, path)


def plot_rate_trace(result, path):
    it = [s.iteration for s in result.log]
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(9, 3.5))
    a1.plot(it, [s.gamma for s in result.log], "o-")
    a1.fill_between(it, [s.gamma_min for s in result.log], [s.gamma_max for s in result.log], alpha=0.2)
    a1.set_xlabel("iteration")
    a1.set_ylabel("gamma")
    a2.plot(it, [s.rate for s in result.log], "o-")
    a2.axhline(result.target, color="r", lw=0.8)
    a2.set_xlabel("iteration")
    a2.set_ylabel("acceleration")
    return _save(fig, path)


def plot_bench(report, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    for nu in dict.fromkeys(r.nu for r in report.records):
        g = [c[0] for c in report.configs() if c[1] == nu]
        ax.plot(g, [report.speedup(x, nu) for x in g], "o-", label="nu=" + "x".join(f"{v:g}" for v in nu))
    ax.axhline(1.0, color="k", lw=0.5)
    ax.set_xlabel("gamma")
    ax.set_ylabel("Tulleken / fast median time")
    ax.legend()
    return _save(fig, path)
