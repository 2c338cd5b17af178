"""Poisson-disc pattern generators.

Every generator accepts a candidate ``y`` only if, for each existing point
``x``, ``||y - x|| > min(r(y), r(x))``.  Under that rule the reach-grid query
(one cell, no neighborhood scan) is exact, so the grid path, the brute-force
path and the Tulleken path make identical decisions for the same seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _kernels as K
from .geometry import Domain, make_rng
from .grid import BridsonGrid, ReachGrid, TullekenGrid
from .radius import ConstantRadiusField, RadiusField

ALGORITHMS = ("fast", "brute", "tulleken", "bridson", "dart")
RULES = {"min": K.RULE_MIN, "candidate": K.RULE_CANDIDATE}


def default_k(ndim: int) -> int:
    return 10 if ndim == 2 else 30


@dataclass
class PatternMeta:
    algorithm: str
    seed: int | None
    k: int | None
    field: dict
    nu: tuple[float, ...]
    rule: str = "min"
    wall_time: float = 0.0
    grid_build_time: float = 0.0
    stats: dict = dc_field(default_factory=dict)


@dataclass
class SamplePattern:
    """Accepted points in insertion order, in the final (post-scaling) domain."""

    points: np.ndarray
    radii: np.ndarray
    domain: Domain
    meta: PatternMeta

    def __len__(self):
        return int(self.points.shape[0])

    @property
    def ndim(self) -> int:
        return self.domain.ndim

    @property
    def nu(self) -> np.ndarray:
        return np.asarray(self.meta.nu, dtype=np.float64)

    @property
    def generation_domain(self) -> Domain:
        return self.domain.shrunk(self.nu)

    def generation_points(self) -> np.ndarray:
        """Points mapped back into the domain they were generated in."""
        return self.points / self.nu


def packing_cap(domain: Domain, r_min: float) -> int:
    """Upper bound on the number of points that can be pairwise farther apart than r_min."""
    n = domain.ndim
    return int(math.prod(e * math.sqrt(n) / r_min + 1 for e in domain.extent))


def conflict_free(candidate, existing, points, field: RadiusField, rule: str = "min") -> bool:
    """True iff ``candidate`` clears every listed point under the chosen rule."""
    existing = np.asarray(existing, dtype=np.int64)
    if existing.size == 0:
        return True
    candidate = np.asarray(candidate, dtype=np.float64)
    pts = np.asarray(points, dtype=np.float64)[existing]
    d2 = np.sum((pts - candidate) ** 2, axis=1)
    r_c = field.evaluate(candidate)
    if rule == "min":
        thr = np.minimum(r_c, field.evaluate_many(pts))
    elif rule == "candidate":
        thr = np.full(existing.size, r_c)
    else:
        raise ValueError(f"unknown conflict rule {rule!r}")
    return bool(np.all(d2 > thr * thr))


def _run(field: RadiusField, k: int, domain: Domain, seed: int, mode: int, algorithm: str,
         rule: str = "min", grid_cls=None, grid_r=None) -> SamplePattern:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    bounds = field.bounds(domain)
    t0 = time.perf_counter()
    if grid_cls is None:
        edge, shape, tbits = 1.0, np.ones(domain.ndim, np.int64), 0
        slots, nslot, head = np.full(1, -1, np.int32), 1, np.full(1, -1, np.int32)
        epoint = enext = np.empty(0, np.int32)
    else:
        grid = grid_cls(domain, grid_r(bounds))
        edge, shape, tbits = grid.cell_edge, grid.shape, grid.tbits
        slots, nslot = grid.slots, grid.nslot
        head, epoint, enext = grid.head, grid.epoint, grid.enext
    t1 = time.perf_counter()
    r_cap = bounds.r_max * (1.0 + 1e-12)
    buf = np.empty(K.window_size(r_cap, edge, domain.ndim) if grid_cls else 1, np.int64)
    rng = make_rng(seed)
    P, R, _, _, _, stats = K.generate(
        rng, domain.lo_array, domain.hi_array, int(k), field.fn, field.gamma, field.params,
        mode, RULES[rule], edge, shape, tbits, slots, nslot, head, epoint, enext, packing_cap(domain, bounds.r_min),
        r_cap, buf)
    t2 = time.perf_counter()
    meta = PatternMeta(algorithm=algorithm, seed=int(seed), k=int(k), field=field.describe(),
                       nu=(1.0,) * domain.ndim, rule=rule, wall_time=t2 - t0,
                       grid_build_time=t1 - t0, stats=_stats_dict(stats))
    meta.stats["r_min"], meta.stats["r_max"] = bounds.r_min, bounds.r_max
    meta.stats["bounds_method"] = bounds.method
    return SamplePattern(P, R, domain, meta)


def _stats_dict(stats) -> dict:
    return {"candidates": int(stats[K.ST_CANDIDATES]), "outside": int(stats[K.ST_OUTSIDE]),
            "distance_checks": int(stats[K.ST_DIST_CHECKS]), "grid_entries": int(stats[K.ST_ENTRIES]),
            "rounds": int(stats[K.ST_ROUNDS])}


def fast_variable(field: RadiusField, k: int | None = None, domain: Domain | None = None,
                  seed: int = 0, rule: str = "min", brute_force: bool = False) -> SamplePattern:
    """Variable-density generation over a reach grid keyed off r_min.

    ``brute_force=True`` replaces the grid lookup with a scan over every
    accepted point; the draw order is unchanged.  With ``rule="candidate"``
    the single-cell lookup can miss a conflict (an existing point farther
    than its own radius but within the candidate's), so the grid and brute
    paths may then diverge.
    """
    domain = domain or Domain.cube(2)
    k = k or default_k(domain.ndim)
    if brute_force:
        return _run(field, k, domain, seed, K.MODE_BRUTE, "brute", rule)
    return _run(field, k, domain, seed, K.MODE_REACH, "fast", rule,
                ReachGrid, lambda b: b.r_min)


def tulleken_variable(field: RadiusField, k: int | None = None, domain: Domain | None = None,
                      seed: int = 0, rule: str = "min") -> SamplePattern:
    """Same outer loop as :func:`fast_variable`, conflicts via an r_max-sized point grid."""
    domain = domain or Domain.cube(2)
    k = k or default_k(domain.ndim)
    bounds = field.bounds(domain)
    if not math.isfinite(bounds.r_max):
        raise ValueError("Tulleken grid needs a finite r_max")
    return _run(field, k, domain, seed, K.MODE_TULLEKEN, "tulleken", rule,
                TullekenGrid, lambda b: b.r_max)


def bridson_constant(r: float, k: int = 30, domain: Domain | None = None, seed: int = 0) -> SamplePattern:
    """Constant-radius generation with a one-point-per-cell grid."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    domain = domain or Domain.cube(2)
    return _run(ConstantRadiusField(r), k, domain, seed, K.MODE_BRIDSON, "bridson", "min",
                BridsonGrid, lambda b: b.r_min)


def dart_throwing(field: RadiusField, domain: Domain | None = None, seed: int = 0,
                  max_consecutive_failures: int = 10_000, rule: str = "min") -> SamplePattern:
    """Reference oracle: uniform darts, each checked against every accepted point."""
    if max_consecutive_failures < 1:
        raise ValueError("max_consecutive_failures must be >= 1")
    domain = domain or Domain.cube(2)
    bounds = field.bounds(domain)
    t0 = time.perf_counter()
    P, R, stats = K.dart_throw(make_rng(seed), domain.lo_array, domain.hi_array, field.fn,
                               field.gamma, field.params, RULES[rule],
                               int(max_consecutive_failures), packing_cap(domain, bounds.r_min))
    meta = PatternMeta(algorithm="dart", seed=int(seed), k=None, field=field.describe(),
                       nu=(1.0,) * domain.ndim, rule=rule, wall_time=time.perf_counter() - t0,
                       stats=_stats_dict(stats))
    return SamplePattern(P, R, domain, meta)


def generate(field: RadiusField, algorithm: str = "fast", k: int | None = None,
             domain: Domain | None = None, seed: int = 0, rule: str = "min", **kw) -> SamplePattern:
    domain = domain or Domain.cube(2)
    if algorithm == "fast":
        return fast_variable(field, k, domain, seed, rule)
    if algorithm == "brute":
        return fast_variable(field, k, domain, seed, rule, brute_force=True)
    if algorithm == "tulleken":
        return tulleken_variable(field, k, domain, seed, rule)
    if algorithm == "bridson":
        if not isinstance(field, ConstantRadiusField):
            raise ValueError("bridson needs a constant radius field")
        return bridson_constant(field.r, k or 30, domain, seed)
    if algorithm == "dart":
        return dart_throwing(field, domain, seed, rule=rule, **kw)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def generate_anisotropic(field: RadiusField, nu, k: int | None = None, domain: Domain | None = None,
                         seed: int = 0, algorithm: str = "fast", rule: str = "min") -> SamplePattern:
    """Extra undersampling by ``nu[d]`` along axis ``d``.

    Generates in the domain shrunk by ``1/nu`` (the field is evaluated there)
    and stretches the result back by ``nu``.
    """
    domain = domain or Domain.cube(2)
    nu = tuple(float(v) for v in nu)
    if len(nu) != domain.ndim:
        raise ValueError(f"need {domain.ndim} anisotropy factors, got {len(nu)}")
    if any(not v >= 1.0 for v in nu):
        raise ValueError(f"anisotropy factors must be >= 1, got {nu}")
    pat = generate(field, algorithm, k, domain.shrunk(nu), seed, rule)
    pat.points = pat.points * np.asarray(nu)
    pat.domain = domain
    pat.meta.nu = nu
    return pat


def is_valid_pattern(pattern: SamplePattern, field: RadiusField | None = None,
                     method: str = "tree") -> tuple[bool, tuple[int, int] | None]:
    """Audit the min-rule over all pairs in the generation domain.

    ``method="brute"`` is the plain O(N^2) scan; ``"tree"`` checks only the
    pairs a k-d tree finds within ``max r``, which contains every possible
    violation.  Returns ``(ok, first_violating_pair)``.
    """
    pts = pattern.generation_points()
    radii = pattern.radii if field is None else field.evaluate_many(pts)
    if len(pts) < 2:
        return True, None
    if method == "brute":
        i, j = K.audit_pairs(pts, radii, K.RULE_MIN)
        return (True, None) if i < 0 else (False, (int(i), int(j)))
    if method != "tree":
        raise ValueError(f"unknown audit method {method!r}")
    from scipy.spatial import cKDTree

    pairs = cKDTree(pts).query_pairs(float(radii.max()), output_type="ndarray")
    if pairs.size == 0:
        return True, None
    pairs.sort(axis=1)
    d = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
    bad = d <= np.minimum(radii[pairs[:, 0]], radii[pairs[:, 1]])
    if not bad.any():
        return True, None
    first = pairs[bad][np.lexsort((pairs[bad][:, 1], pairs[bad][:, 0]))[0]]
    return False, (int(first[0]), int(first[1]))
