"""Variable-density Poisson-disc sampling on rectangular k-space domains."""

__version__ = "0.1.0"

from .geometry import Domain, in_domain, make_rng, sample_annulus, uniform_in_domain  # noqa: E402
from .radius import (ConstantRadiusField, CustomRadiusField, FieldContractError,  # noqa: E402
                     ParametricRadiusField, RadiusBounds, make_field, radius_bounds)
from .sampler import (SamplePattern, bridson_constant, dart_throwing, fast_variable,  # noqa: E402
                      generate, generate_anisotropic, is_valid_pattern, tulleken_variable)
from .rate import AccelerationSpec, UnreachableRate, acceleration_rate, rate_search  # noqa: E402
from .io import rasterize_mask  # noqa: E402

__all__ = [
    "Domain", "in_domain", "make_rng", "sample_annulus", "uniform_in_domain",
    "ConstantRadiusField", "CustomRadiusField", "FieldContractError", "ParametricRadiusField",
    "RadiusBounds", "make_field", "radius_bounds",
    "SamplePattern", "bridson_constant", "dart_throwing", "fast_variable", "generate",
    "generate_anisotropic", "is_valid_pattern", "tulleken_variable",
    "AccelerationSpec", "UnreachableRate", "acceleration_rate", "rate_search", "rasterize_mask",
]
