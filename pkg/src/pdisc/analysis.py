"""Quality metrics for generated patterns.

Voronoi cell areas are measured on a raster: every pixel center goes to its
nearest sample (Euclidean), and a cell's area is its pixel count times the
pixel area.  A k-d tree does the lookup; :func:`voronoi_labels_brute` is the
plain definition, used to check it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geometry import make_rng
from .radius import RadiusField
from .sampler import SamplePattern, is_valid_pattern

DEFAULT_RES = 1024
DEFAULT_BINS = 20


@dataclass
class VoronoiProfile:
    distance: np.ndarray      # per point, from the origin
    area: np.ndarray          # per point, domain units
    resolution: int
    domain_area: float
    boundary: np.ndarray      # True where the cell touches the domain edge
    r_max: float              # origin to farthest corner

    @property
    def total_area(self) -> float:
        return float(self.area.sum())

    def __len__(self):
        return int(self.area.size)


@dataclass
class ProfileComparison:
    edges: np.ndarray
    median_a: np.ndarray
    median_b: np.ndarray
    count_a: np.ndarray
    count_b: np.ndarray
    rel_diff: np.ndarray      # |median_b - median_a| / median_a, nan where a bin is empty

    @property
    def empty(self) -> np.ndarray:
        return (self.count_a == 0) | (self.count_b == 0)

    @property
    def max_rel_diff(self) -> float:
        ok = ~self.empty
        return float(np.max(self.rel_diff[ok])) if ok.any() else float("nan")


@dataclass
class CoverageReport:
    n_probes: int
    multipliers: tuple[float, ...]
    fractions: tuple[float, ...]

    def at(self, m: float) -> float:
        return self.fractions[self.multipliers.index(m)]

    @property
    def fraction_r(self) -> float:
        return self.at(1.0)

    @property
    def fraction_2r(self) -> float:
        return self.at(2.0)


@dataclass
class NNStats:
    n: int
    min_ratio: float
    mean_ratio: float
    max_ratio: float

    @property
    def valid(self) -> bool:
        return self.min_ratio > 1.0


def _pixel_centers(domain, D: int) -> tuple[np.ndarray, np.ndarray]:
    axes = [lo + (np.arange(D) + 0.5) * (hi - lo) / D for lo, hi in zip(domain.lo, domain.hi)]
    gx, gy = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()]), np.array([a.size for a in axes])


def voronoi_labels(points: np.ndarray, domain, D: int) -> np.ndarray:
    """Index of the nearest point for each pixel, shape ``(D, D)``."""
    centers, _ = _pixel_centers(domain, D)
    _, lab = cKDTree(points).query(centers, k=1)
    return lab.reshape(D, D)


def voronoi_labels_brute(points: np.ndarray, domain, D: int) -> np.ndarray:
    centers, _ = _pixel_centers(domain, D)
    d2 = ((centers[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1).reshape(D, D)


def voronoi_areas(pattern: SamplePattern, D: int = DEFAULT_RES, min_res: int = 256) -> VoronoiProfile:
    """Discrete Voronoi cell area of every point, in the pattern's own domain."""
    if pattern.ndim != 2:
        raise ValueError(f"Voronoi areas are only supported in 2-D, pattern is {pattern.ndim}-D")
    if D < min_res:
        raise ValueError(f"resolution must be >= {min_res}, got {D}")
    if len(pattern) == 0:
        raise ValueError("pattern is empty")
    dom = pattern.domain
    lab = voronoi_labels(pattern.points, dom, D)
    pix = dom.volume / (D * D)
    area = np.bincount(lab.ravel(), minlength=len(pattern)) * pix
    edge = np.zeros(len(pattern), dtype=bool)
    for ring in (lab[0], lab[-1], lab[:, 0], lab[:, -1]):
        edge[ring] = True
    far = float(np.linalg.norm(np.maximum(np.abs(dom.lo_array), np.abs(dom.hi_array))))
    return VoronoiProfile(np.linalg.norm(pattern.points, axis=1), area, D, dom.volume, edge, far)


def _pool(profiles) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    if isinstance(profiles, VoronoiProfile):
        profiles = [profiles]
    dist = np.concatenate([p.distance for p in profiles])
    area = np.concatenate([p.area for p in profiles])
    edge = np.concatenate([p.boundary for p in profiles])
    return dist, area, edge, max(p.r_max for p in profiles)


def binned_medians(profiles, bins: int = DEFAULT_BINS, r_hi: float | None = None,
                   exclude_boundary: bool = False) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(edges, median area, count)`` over equal-width distance bins on ``[0, r_hi]``."""
    dist, area, edge, far = _pool(profiles)
    r_hi = far if r_hi is None else r_hi
    if exclude_boundary:
        dist, area = dist[~edge], area[~edge]
    edges = np.linspace(0.0, r_hi, bins + 1)
    which = np.clip(np.digitize(dist, edges) - 1, 0, bins - 1)
    med = np.full(bins, np.nan)
    cnt = np.bincount(which, minlength=bins)
    for b in np.flatnonzero(cnt):
        med[b] = np.median(area[which == b])
    return edges, med, cnt


def profile_similarity(a, b, bins: int = DEFAULT_BINS, exclude_boundary: bool = False) -> ProfileComparison:
    """Per-bin median areas of two (pooled) profiles and their relative gap.

    ``a`` and ``b`` may each be one :class:`VoronoiProfile` or a list to pool.
    Bins empty on either side are reported with ``nan`` and flagged in
    :attr:`ProfileComparison.empty`.
    """
    pa = [a] if isinstance(a, VoronoiProfile) else list(a)
    pb = [b] if isinstance(b, VoronoiProfile) else list(b)
    if {p.resolution for p in pa} != {p.resolution for p in pb} or len({p.domain_area for p in pa + pb}) != 1:
        raise ValueError("profiles must share domain and resolution")
    r_hi = max(p.r_max for p in pa + pb)
    edges, ma, ca = binned_medians(pa, bins, r_hi, exclude_boundary)
    _, mb, cb = binned_medians(pb, bins, r_hi, exclude_boundary)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.abs(mb - ma) / ma
    return ProfileComparison(edges, ma, mb, ca, cb, rel)


def coverage_fraction(pattern: SamplePattern, field: RadiusField, n_probes: int = 10_000,
                      seed: int = 0, multipliers: Sequence[float] = (1.0, 2.0),
                      min_probes: int = 10_000) -> CoverageReport:
    """Share of uniform probes ``z`` with a sample within ``m * r(z)``.

    Probes, samples and ``r`` all live in the generation domain.  A maximal
    pattern covers every probe at ``m = 1``.
    """
    if n_probes < min_probes:
        raise ValueError(f"need at least {min_probes} probes, got {n_probes}")
    mults = tuple(float(m) for m in multipliers)
    if len(pattern) == 0:
        return CoverageReport(n_probes, mults, tuple(0.0 for _ in mults))
    dom = pattern.generation_domain
    rng = make_rng(seed)
    z = dom.lo_array + dom.extent * rng.random((n_probes, dom.ndim))
    d, _ = cKDTree(pattern.generation_points()).query(z, k=1)
    r = field.evaluate_many(z)
    return CoverageReport(n_probes, mults, tuple(float(np.mean(d <= m * r)) for m in mults))


def nn_stats(pattern: SamplePattern, field: RadiusField | None = None) -> NNStats:
    """Nearest-neighbor distance over ``min(r(p), r(nn))``, in the generation domain."""
    if len(pattern) < 2:
        raise ValueError("need at least two points")
    pts = pattern.generation_points()
    radii = pattern.radii if field is None else field.evaluate_many(pts)
    d, j = cKDTree(pts).query(pts, k=2)
    ratio = d[:, 1] / np.minimum(radii, radii[j[:, 1]])
    return NNStats(len(pts), float(ratio.min()), float(ratio.mean()), float(ratio.max()))


def audit(pattern: SamplePattern, field: RadiusField | None = None, method: str = "tree"):
    return is_valid_pattern(pattern, field, method)


def write_voronoi_csv(profile: VoronoiProfile, path) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["point_index", "distance", "area"])
        for i, (d, a) in enumerate(zip(profile.distance, profile.area)):
            w.writerow([i, repr(float(d)), repr(float(a))])
    return Path(path)


def write_coverage_csv(report: CoverageReport, path) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["multiplier", "fraction"])
        for m, f in zip(report.multipliers, report.fractions):
            w.writerow([m, f])
    return Path(path)


def write_similarity_csv(cmp: ProfileComparison, path, names=("a", "b")) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_lo", "bin_hi", f"median_{names[0]}", f"median_{names[1]}",
                    f"count_{names[0]}", f"count_{names[1]}", "rel_diff"])
        for i in range(cmp.rel_diff.size):
            w.writerow([cmp.edges[i], cmp.edges[i + 1], cmp.median_a[i], cmp.median_b[i],
                        int(cmp.count_a[i]), int(cmp.count_b[i]), cmp.rel_diff[i]])
    return Path(path)
