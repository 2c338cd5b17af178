"""Poisson-disc threshold fields ``r(x)`` and their bounds over a domain."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._kernels import KIND_CONSTANT, KIND_PARAMETRIC, builtin_radius
from .geometry import Domain

DEFAULT_OFFSET = 0.15
PROBE_SAFETY = 0.9  # probe-grid r_min is scaled down by this factor


class FieldContractError(ValueError):
    """A radius field produced a non-positive or non-finite threshold."""


@dataclass(frozen=True)
class RadiusBounds:
    r_min: float
    r_max: float
    method: str = "closed-form"

    def __post_init__(self):
        if not (self.r_min > 0 and np.isfinite(self.r_min)):
            raise FieldContractError(f"r_min must be positive, got {self.r_min}")
        if not self.r_max >= self.r_min:
            raise FieldContractError(f"r_max={self.r_max} < r_min={self.r_min}")


class RadiusField:
    """Base class: a jitted ``fn(x, gamma, params) -> r`` plus a density knob ``gamma``.

    Subclasses must keep ``r`` non-increasing in ``gamma``.
    """

    family = "abstract"
    fn: Callable
    gamma: float
    params: np.ndarray

    def evaluate(self, p) -> float:
        r = float(self.fn(np.asarray(p, dtype=np.float64), self.gamma, self.params))
        if not (r > 0 and np.isfinite(r)):
            raise FieldContractError(f"field returned r={r} at {p}")
        return r

    __call__ = evaluate

    def evaluate_many(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        out = np.array([self.fn(p, self.gamma, self.params) for p in pts])
        if pts.shape[0] and not (np.all(out > 0) and np.all(np.isfinite(out))):
            raise FieldContractError("field returned a non-positive threshold")
        return out

    def bounds(self, domain: Domain) -> RadiusBounds:
        raise NotImplementedError

    def with_gamma(self, gamma: float) -> "RadiusField":
        raise NotImplementedError

    def describe(self) -> dict:
        return {"family": self.family, "gamma": self.gamma}


class ParametricRadiusField(RadiusField):
    """``r(x) = (||x||_2 + offset) / gamma``."""

    family = "parametric"
    fn = staticmethod(builtin_radius)

    def __init__(self, gamma: float, offset: float = DEFAULT_OFFSET):
        if not gamma > 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        self.gamma = float(gamma)
        self.offset = float(offset)
        self.params = np.array([KIND_PARAMETRIC, self.offset], dtype=np.float64)

    def evaluate_many(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        out = (np.sqrt(np.sum(pts * pts, axis=1)) + self.offset) / self.gamma
        if pts.shape[0] and not np.all(out > 0):
            raise FieldContractError("field returned a non-positive threshold")
        return out

    def bounds(self, domain: Domain) -> RadiusBounds:
        lo, hi = domain.lo_array, domain.hi_array
        nearest = np.clip(0.0, lo, hi)
        far = np.maximum(np.abs(lo), np.abs(hi))
        r_min = (np.linalg.norm(nearest) + self.offset) / self.gamma
        r_max = (np.linalg.norm(far) + self.offset) / self.gamma
        return RadiusBounds(float(r_min), float(r_max))

    def with_gamma(self, gamma: float) -> "ParametricRadiusField":
        return ParametricRadiusField(gamma, self.offset)

    def describe(self) -> dict:
        return {"family": self.family, "gamma": self.gamma, "offset": self.offset}

    def __repr__(self):
        return f"ParametricRadiusField(gamma={self.gamma}, offset={self.offset})"


class ConstantRadiusField(RadiusField):
    """``r(x) = value / gamma`` everywhere."""

    family = "constant"
    fn = staticmethod(builtin_radius)

    def __init__(self, value: float, gamma: float = 1.0):
        if not gamma > 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        if not value > 0:
            raise FieldContractError(f"constant radius must be positive, got {value}")
        self.value = float(value)
        self.gamma = float(gamma)
        self.params = np.array([KIND_CONSTANT, self.value], dtype=np.float64)

    @property
    def r(self) -> float:
        return self.value / self.gamma

    def evaluate_many(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        return np.full(pts.shape[0], self.r)

    def bounds(self, domain: Domain) -> RadiusBounds:
        return RadiusBounds(self.r, self.r)

    def with_gamma(self, gamma: float) -> "ConstantRadiusField":
        return ConstantRadiusField(self.value, gamma)

    def describe(self) -> dict:
        return {"family": self.family, "gamma": self.gamma, "value": self.value}

    def __repr__(self):
        return f"ConstantRadiusField(value={self.value}, gamma={self.gamma})"


class CustomRadiusField(RadiusField):
    """User field from a ``numba.njit`` function ``fn(x, gamma, params)``.

    ``r_min`` must be declared, either as a number valid for this ``gamma`` or
    as a callable ``gamma -> r_min``.  ``r_max`` defaults to a probe-grid
    estimate, which is flagged in the returned bounds.
    """

    family = "custom"

    def __init__(self, fn, gamma: float, r_min, params=(), r_max=None, probe_res: int = 65):
        if not gamma > 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        self.fn = fn
        self.gamma = float(gamma)
        self.params = np.asarray(params, dtype=np.float64).reshape(-1)
        if self.params.size == 0:
            self.params = np.zeros(1)
        self._r_min = r_min
        self._r_max = r_max
        self.probe_res = probe_res

    def _declared(self, value):
        return value(self.gamma) if callable(value) else value

    def bounds(self, domain: Domain) -> RadiusBounds:
        r_min = self._declared(self._r_min)
        if r_min is None or not r_min > 0:
            raise FieldContractError("custom fields must declare r_min > 0")
        if self._r_max is not None:
            return RadiusBounds(float(r_min), float(self._declared(self._r_max)), "declared")
        axes = [np.linspace(a, b, self.probe_res) for a, b in zip(domain.lo, domain.hi)]
        probes = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)
        vals = self.evaluate_many(probes)
        r_max = max(float(vals.max()) / PROBE_SAFETY, float(r_min))
        return RadiusBounds(float(r_min), r_max, "declared-min/probe-max")

    def with_gamma(self, gamma: float) -> "CustomRadiusField":
        if not (self._r_min is None or callable(self._r_min)):
            raise ValueError("rescaling a custom field needs r_min given as a callable of gamma")
        return CustomRadiusField(self.fn, gamma, self._r_min, self.params, self._r_max, self.probe_res)


def eval_radius(field: RadiusField, p) -> float:
    return field.evaluate(p)


def radius_bounds(field: RadiusField, domain: Domain) -> RadiusBounds:
    return field.bounds(domain)


def scaled_field(field: RadiusField, gamma: float) -> RadiusField:
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return field.with_gamma(gamma)


def make_field(family: str, gamma: float, offset: float = DEFAULT_OFFSET, value: float | None = None) -> RadiusField:
    """Build a field from its config/CLI description."""
    if family == "parametric":
        return ParametricRadiusField(gamma, offset)
    if family == "constant":
        if value is None:
            raise ValueError("constant field needs a value")
        return ConstantRadiusField(value, gamma)
    raise ValueError(f"unknown field family {family!r}")
