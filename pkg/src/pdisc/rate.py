"""Acceleration rate of a mask and the bisection on gamma that targets one.

The rate is ``required / acquired``: cells of the full Cartesian matrix over
distinct occupied cells, so ``alpha > 1`` means undersampling.  It falls as
gamma grows (smaller discs, more samples).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .geometry import Domain
from .io import MaskRaster, rasterize_mask
from .radius import RadiusField
from .sampler import SamplePattern, generate_anisotropic


class UnreachableRate(RuntimeError):
    """The target rate is not bracketed by the gamma bounds."""

    def __init__(self, msg: str, result: "RateResult | None" = None):
        super().__init__(msg)
        self.result = result


@dataclass(frozen=True)
class AccelerationSpec:
    alpha: float
    matrix: tuple[int, ...]
    gamma_min: float = 0.0
    gamma_max: float | None = None     # None: pick from default_gamma_bounds
    tol: float = 0.01                  # on the gamma interval
    rate_tol: float | None = None      # optional early stop on |rate - alpha|

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValueError(f"target rate must exceed 1, got {self.alpha}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.gamma_min < 0:
            raise ValueError("gamma_min must be >= 0")
        if self.gamma_max is not None and not self.gamma_max > self.gamma_min:
            raise ValueError(f"need gamma_min < gamma_max, got [{self.gamma_min}, {self.gamma_max}]")
        if any(int(m) < 1 for m in self.matrix):
            raise ValueError(f"matrix sizes must be >= 1, got {self.matrix}")


def acceleration_rate(pattern: SamplePattern | MaskRaster, matrix=None, calib=None) -> float:
    """``prod(M) / occupied cells``; accepts a pattern plus matrix, or a mask."""
    if isinstance(pattern, MaskRaster):
        mask = pattern
    else:
        if len(pattern) == 0:
            raise ValueError("acceleration rate of an empty pattern is undefined")
        mask = rasterize_mask(pattern, matrix, calib)
    if mask.occupied == 0:
        raise ValueError("acceleration rate of an empty mask is undefined")
    return math.prod(mask.sizes) / mask.occupied


def point_rate(pattern: SamplePattern, matrix) -> float:
    """Same ratio on raw point count (duplicates counted)."""
    return math.prod(int(m) for m in matrix) / len(pattern)


def default_gamma_bounds(field: RadiusField, domain: Domain, matrix,
                         rule: str = "r_min") -> tuple[float, float]:
    """``(0, gamma_max)`` with gamma_max where the field reaches the grid spacing.

    ``rule="r_min"`` solves ``r_min(gamma) = dk`` (for the parametric field
    ``offset / dk``).  ``rule="r_max"`` solves ``r_max(gamma) = dk``, the
    gamma past which every disc is smaller than one cell and the mask is
    essentially full.  Both assume ``r`` scales as ``1/gamma``.
    """
    dk = float(np.min(domain.extent / np.asarray(matrix, dtype=np.float64)))
    b = field.with_gamma(1.0).bounds(domain)
    if rule == "r_min":
        return 0.0, b.r_min / dk
    if rule == "r_max":
        return 0.0, b.r_max / dk
    raise ValueError(f"unknown bound rule {rule!r}")


@dataclass
class RateStep:
    iteration: int
    gamma_min: float
    gamma_max: float
    eps: float
    gamma: float
    seed: int
    rate: float
    point_rate: float
    points: int
    occupied: int


@dataclass
class RateResult:
    pattern: SamplePattern | None
    mask: MaskRaster | None
    rate: float
    gamma: float
    target: float
    log: list[RateStep]
    probes: list[RateStep] = dc_field(default_factory=list)   # bracket checks
    reached: bool = True
    rate_std: float | None = None

    @property
    def rate_error(self) -> float:
        return self.rate - self.target

    @property
    def relative_error(self) -> float:
        return abs(self.rate - self.target) / self.target


def _measure(field, gamma, nu, k, domain, seed, matrix, calib, algorithm):
    pat = generate_anisotropic(field.with_gamma(gamma), nu, k, domain, seed, algorithm)
    mask = rasterize_mask(pat, matrix, calib)
    return pat, mask, acceleration_rate(mask)


def _step(i, lo, hi, eps, gamma, seed, pat, mask, rate, matrix):
    return RateStep(i, lo, hi, eps, gamma, seed, rate, point_rate(pat, matrix) if len(pat) else math.inf,
                    len(pat), mask.occupied)


def rate_search(spec: AccelerationSpec, field: RadiusField, nu=None, k: int | None = None,
                seed: int = 0, fresh_seeds: bool = False, best_effort: bool = False,
                bound_rule: str = "r_max", calib=None, algorithm: str = "fast",
                spread_samples: int = 0, check_bracket: bool = True) -> RateResult:
    """Bisection on gamma until the bracket half-width ``eps`` is <= ``spec.tol``.

    Every step regenerates at ``gamma_mid``; a rate above the target means too
    few samples, so the lower bound moves up.  With ``fresh_seeds=False`` the
    same seed is reused at each step and the whole search is reproducible.
    ``spread_samples > 0`` reruns the final gamma with that many extra seeds
    and reports the standard deviation of the rate there.
    """
    domain = Domain.cube(len(spec.matrix))
    nu = tuple(nu) if nu is not None else (1.0,) * domain.ndim
    lo, hi = spec.gamma_min, spec.gamma_max
    if hi is None:
        hi = default_gamma_bounds(field, domain, spec.matrix, bound_rule)[1]
        if not hi > lo:
            raise ValueError(f"default gamma_max={hi:g} is not above gamma_min={lo:g}")
    matrix = spec.matrix
    result = RateResult(None, None, math.nan, math.nan, spec.alpha, [])

    if check_bracket:
        # the densest end must reach the target
        pat, mask, rate = _measure(field, hi, nu, k, domain, seed, matrix, calib, algorithm)
        result.probes.append(_step(-1, lo, hi, 0.0, hi, seed, pat, mask, rate, matrix))
        if rate > spec.alpha:
            result.pattern, result.mask, result.rate, result.gamma = pat, mask, rate, hi
            result.reached = False
            if not best_effort:
                raise UnreachableRate(f"rate at gamma_max={hi:g} is {rate:.4g} > target {spec.alpha:g}; "
                                      "raise gamma_max or lower the target", result)
            return result
        if lo > 0:
            pat, mask, rate = _measure(field, lo, nu, k, domain, seed, matrix, calib, algorithm)
            result.probes.append(_step(-1, lo, hi, 0.0, lo, seed, pat, mask, rate, matrix))
            if rate < spec.alpha:
                result.pattern, result.mask, result.rate, result.gamma = pat, mask, rate, lo
                result.reached = False
                if not best_effort:
                    raise UnreachableRate(f"rate at gamma_min={lo:g} is {rate:.4g} < target {spec.alpha:g}; "
                                          "lower gamma_min or raise the target", result)
                return result

    # eps from the initial width so that it halves exactly in floating point
    width = hi - lo
    i = 0
    while True:
        eps = width / 2.0 ** (i + 1)
        mid = eps + lo
        s = seed + i if fresh_seeds else seed
        pat, mask, rate = _measure(field, mid, nu, k, domain, s, matrix, calib, algorithm)
        result.log.append(_step(i, lo, hi, eps, mid, s, pat, mask, rate, matrix))
        if rate > spec.alpha:
            lo = mid
        else:
            hi = mid
        i += 1
        if not eps > spec.tol:
            break
        if spec.rate_tol is not None and abs(rate - spec.alpha) <= spec.rate_tol:
            break

    result.pattern, result.mask, result.rate, result.gamma = pat, mask, rate, mid
    if spread_samples > 0:
        rates = [_measure(field, mid, nu, k, domain, seed + 10_000 + j, matrix, calib, algorithm)[2]
                 for j in range(spread_samples)]
        result.rate_std = float(np.std(rates + [rate], ddof=1))
    return result
