"""Domains, the seeded random stream, and candidate-point generators.

All randomness flows through a single :class:`numpy.random.Generator` backed
by PCG64 and seeded with a 64-bit unsigned integer.  The jitted kernels share
the same generator object (numba reproduces numpy's PCG64 draws exactly), so
a pattern is fully determined by ``(seed, config)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SEED_MAX = 2**64 - 1


def make_rng(seed: int) -> np.random.Generator:
    """Return a fresh PCG64 generator for ``seed`` (0 <= seed < 2**64)."""
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box ``[lo, hi)`` in normalized k-space units."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or len(lo) < 1:
            raise ValueError("lo and hi must have the same positive length")
        if not all(np.isfinite(lo)) or not all(np.isfinite(hi)):
            raise ValueError("domain bounds must be finite")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError(f"need lo < hi on every axis, got lo={lo} hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, ndim: int = 2) -> "Domain":
        """The unit cube centered on the origin, ``[-0.5, 0.5)^ndim``."""
        return cls((-0.5,) * ndim, (0.5,) * ndim)

    @property
    def ndim(self) -> int:
        return len(self.lo)

    @property
    def lo_array(self) -> np.ndarray:
        return np.array(self.lo, dtype=np.float64)

    @property
    def hi_array(self) -> np.ndarray:
        return np.array(self.hi, dtype=np.float64)

    @property
    def extent(self) -> np.ndarray:
        return self.hi_array - self.lo_array

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))

    def corners(self) -> np.ndarray:
        grids = np.meshgrid(*zip(self.lo, self.hi), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def scaled(self, factors) -> "Domain":
        """Multiply axis ``d`` by ``factors[d]``."""
        f = np.asarray(factors, dtype=np.float64)
        return Domain(tuple(self.lo_array * f), tuple(self.hi_array * f))

    def shrunk(self, factors) -> "Domain":
        """Divide axis ``d`` by ``factors[d]``."""
        f = np.asarray(factors, dtype=np.float64)
        return Domain(tuple(self.lo_array / f), tuple(self.hi_array / f))


def in_domain(domain: Domain, p) -> bool:
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (domain.ndim,):
        raise ValueError(f"point has shape {p.shape}, domain is {domain.ndim}-D")
    return bool(np.all(domain.lo_array <= p) and np.all(p < domain.hi_array))


def uniform_in_domain(domain: Domain, rng: np.random.Generator) -> np.ndarray:
    """Uniform point in ``domain``; one ``rng.random()`` draw per axis, in axis order."""
    lo, hi = domain.lo_array, domain.hi_array
    while True:
        p = lo + (hi - lo) * rng.random(domain.ndim)
        # lo + extent*u can round up to hi
        if np.all(p < hi):
            return p


def sample_annulus(center, r: float, rng: np.random.Generator) -> np.ndarray:
    """Point at distance in ``[r, 2r]`` from ``center``.

    The direction is a normalized vector of independent standard normals and
    the magnitude is uniform on ``[r, 2r]``.  This is not volume-uniform over
    the annulus: inner shells are over-represented.  Draw order is ``n``
    normals followed by one uniform.
    """
    if not r > 0:
        raise ValueError(f"annulus radius must be positive, got {r}")
    center = np.asarray(center, dtype=np.float64)
    while True:
        u = rng.standard_normal(center.size)
        norm = np.sqrt(np.dot(u, u))
        if norm > 0.0:
            break
    mag = r + r * rng.random()
    return center + u * (mag / norm)
