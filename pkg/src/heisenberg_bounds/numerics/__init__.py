"""Special functions, quadrature and Monte Carlo integration."""

from .special import beta_fn, gamma_fn, log_gamma, sphere_area
from .quadrature import IntegralResult, QuadratureSpec, integrate_1d, integrate_nested
from .montecarlo import MCSpec, Sampler, box_sampler, mc_integrate

__all__ = [
    "IntegralResult", "MCSpec", "QuadratureSpec", "Sampler", "beta_fn", "box_sampler",
    "gamma_fn", "integrate_1d", "integrate_nested", "log_gamma", "mc_integrate",
    "sphere_area",
]
