"""Integral operators with homogeneous kernels on H^n.

All built-in kernels depend on |x|_h and |y|_h only and are homogeneous of
degree -Q (degree -mQ for the m-linear Hilbert kernel), so with
k(rho) = K(e, rho) for |e|_h = 1

    K(x, y) = |x|_h^-Q k(|y|_h / |x|_h),
    Tf(x)   = omega_Q int_0^inf k(rho) f(r rho) rho^(Q-1) drho,   r = |x|_h.

Degree -Q is the only degree for which the substitution y -> delta_r y
produces the weight |y|_h^(-Q/p) in the operator norm; degree -n is not
supported.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, InvalidArgumentError
from .group import annulus_sampler, draw_annulus, draw_sphere, koranyi_norm, polar_compose
from .mixed_norm import RADIAL, mixed_norm_result, radial_function
from .numerics.montecarlo import MCSpec, Sampler, mc_integrate
from .numerics.quadrature import QuadratureSpec, integrate_1d, integrate_nested

HILBERT = "hilbert"
HLP = "hlp"
MLINEAR = "mlinear"
CUSTOM = "custom"

INNER_QUAD = QuadratureSpec(rel_tol=1e-12)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel of an integral operator, given through its radial profile.

    ``origin_exponent`` / ``tail_exponent``: k(rho) ~ rho**e as rho -> 0 / inf.
    ``breakpoints``: kinks of the profile, passed to the quadrature.
    For ``mlinear`` the profile takes m radii.
    """

    kind: str
    Q: int
    radial_profile: object
    homogeneity_degree: float
    origin_exponent: float = 0.0
    tail_exponent: float = None
    breakpoints: tuple = ()
    m: int = 1

    def __post_init__(self):
        expected = -self.m * self.Q
        if self.homogeneity_degree != expected:
            raise InvalidArgumentError(
                f"kernel homogeneity must be {expected} (got {self.homogeneity_degree}); "
                "other degrees break the dilation identities")

    @property
    def name(self):
        return f"{self.kind}{self.m}" if self.kind == MLINEAR else self.kind

    def pointwise(self, x, y):
        """K(x, y) for batches of points (last axis = coordinates)."""
        if self.kind == MLINEAR:
            raise InvalidArgumentError("use mlinear_pointwise for multilinear kernels")
        rx = np.asarray(koranyi_norm(x), dtype=float)
        ry = np.asarray(koranyi_norm(y), dtype=float)
        return rx ** (-self.Q) * self.radial_profile(ry / rx)

    def mlinear_pointwise(self, x, ys):
        rx = np.asarray(koranyi_norm(x), dtype=float)
        s = rx ** self.Q
        for y in ys:
            s = s + np.asarray(koranyi_norm(y), dtype=float) ** self.Q
        return s ** (-self.m)


def hilbert_kernel(Q):
    """K(x, y) = 1 / (|x|^Q + |y|^Q)."""
    return KernelSpec(HILBERT, Q, lambda r: 1.0 / (1.0 + np.asarray(r, dtype=float) ** Q),
                      -Q, 0.0, -float(Q))


def hlp_kernel(Q):
    """K(x, y) = 1 / max(|x|^Q, |y|^Q)."""
    return KernelSpec(HLP, Q,
                      lambda r: 1.0 / np.maximum(1.0, np.asarray(r, dtype=float) ** Q),
                      -Q, 0.0, -float(Q), breakpoints=(1.0,))


def mlinear_kernel(Q, m):
    """K(x, y_1..y_m) = (|x|^Q + sum |y_i|^Q)^-m."""
    if m < 1:
        raise InvalidArgumentError("m must be >= 1")

    def profile(*radii):
        s = 1.0
        for r in radii:
            s = s + np.asarray(r, dtype=float) ** Q
        return s ** (-m)

    return KernelSpec(MLINEAR, Q, profile, -m * Q, 0.0, -float(Q), m=m)


def custom_kernel(Q, profile, origin_exponent, tail_exponent, breakpoints=(),
                  homogeneity_degree=None):
    hd = -Q if homogeneity_degree is None else homogeneity_degree
    return KernelSpec(CUSTOM, Q, profile, hd, origin_exponent, tail_exponent,
                      tuple(breakpoints))


def kernel_by_name(name, Q, m=1):
    if name == HILBERT:
        return hilbert_kernel(Q)
    if name == HLP:
        return hlp_kernel(Q)
    if name == MLINEAR:
        return mlinear_kernel(Q, m)
    raise InvalidArgumentError(f"unknown operator {name!r}")


# -- radial application ------------------------------------------------------

def _require_radial(f):
    if f.kind != RADIAL:
        raise InvalidArgumentError("quadrature path needs a radial function; radialize first")


def _inner_range(f, r):
    lo, hi = f.support
    return lo / r, hi / r


def apply_radial_result(kernel, f, x_radius, space, quad=None):
    """Tf at any point of Koranyi radius ``x_radius`` (Tf is radial)."""
    _require_radial(f)
    if kernel.kind == MLINEAR and kernel.m > 1:
        raise InvalidArgumentError("use apply_mlinear for m > 1")
    if not x_radius > 0:
        raise InvalidArgumentError("x_radius must be positive")
    quad = quad or INNER_QUAD
    Q = space.Q
    r = float(x_radius)
    a, b = _inner_range(f, r)
    left = right = None
    if a == 0.0:
        left = kernel.origin_exponent + Q - 1 + (f.origin_power or 0.0)
        if f.origin_power is None:
            left = None
    if b == math.inf:
        if f.tail_power is not None and kernel.tail_exponent is not None:
            right = kernel.tail_exponent + Q - 1 + f.tail_power
    R = f.radial
    k = kernel.radial_profile

    def integrand(rho):
        # far out k underflows to 0 while rho^(Q-1) may overflow
        with np.errstate(over="ignore", invalid="ignore"):
            w = k(rho) * rho ** (Q - 1)
        return np.where(np.isfinite(w), w, 0.0) * R(r * rho)

    pts = [p for p in kernel.breakpoints if a < p < b]
    res = integrate_1d(integrand, a, b, quad.with_endpoints(left, right), points=pts)
    return res.scaled(space.omega_Q)


def apply_radial(kernel, f, x_radius, space, quad=None):
    return apply_radial_result(kernel, f, x_radius, space, quad).value


def image_powers(kernel, f, Q):
    """Power laws of Tf at 0 and at infinity, from those of f and the kernel."""
    lo, hi = f.support
    a0 = math.inf if lo > 0 else f.origin_power
    ainf = -math.inf if hi < math.inf else f.tail_power
    k_inf = kernel.tail_exponent
    k0 = kernel.origin_exponent
    origin = tail = None
    if a0 is not None and k_inf is not None:
        origin = min(a0, -Q - k_inf)
    if ainf is not None:
        tail = max(ainf, -Q - k0)
    return origin, tail


class _ErrorTracker:
    def __init__(self):
        self.worst = 0.0

    def note(self, res):
        if res.value != 0:
            self.worst = max(self.worst, res.relative_error)


def image_function(kernel, f, space, quad=None, tracker=None):
    """Tf as a radial :class:`TestFunction` evaluated by quadrature on demand."""
    _require_radial(f)
    origin, tail = image_powers(kernel, f, space.Q)

    def profile(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty(r.shape)
        for i, rk in enumerate(r.ravel()):
            res = apply_radial_result(kernel, f, rk, space, quad)
            if tracker is not None:
                tracker.note(res)
            out.flat[i] = res.value
        return out

    return radial_function(profile, (0.0, math.inf), origin, tail)


# -- Monte Carlo application -------------------------------------------------

def _support_sampler(f, space):
    lo, hi = f.support
    if hi == math.inf:
        raise InvalidArgumentError("Monte Carlo path needs a bounded support")
    return annulus_sampler(space, lo, hi)


def apply_general(kernel, f, x, space, mc=None):
    """MC estimate of int K(x, y) f(y) dy over the support of f."""
    sampler = _support_sampler(f, space)
    x = np.asarray(x, dtype=float)

    def integrand(y):
        return kernel.pointwise(x, y) * f(y)

    return mc_integrate(integrand, sampler, mc or MCSpec())


def spherical_mean_general(kernel, f, radius, space, mc=None):
    """MC estimate of the sphere average of Tf at ``radius``.

    Each sample pairs a direction theta_x with a point y of the support:
    the estimator is K(delta_r theta_x, y) f(y) times the support measure.
    """
    lo, hi = f.support
    if hi == math.inf:
        raise InvalidArgumentError("Monte Carlo path needs a bounded support")
    d = space.dim
    measure = space.ball_volume * (hi**space.Q - lo**space.Q)

    def draw(rng, size):
        theta = draw_sphere(rng, space, size)
        y = draw_annulus(rng, space, lo, hi, size)
        return np.concatenate([theta, y], axis=1)

    def integrand(s):
        x = polar_compose(np.full(s.shape[0], float(radius)), s[:, :d])
        return kernel.pointwise(x, s[:, d:]) * f(s[:, d:])

    return mc_integrate(integrand, Sampler(draw, measure), mc or MCSpec())


def apply_mlinear_general(m, f_list, x, space, mc=None):
    """Full Cartesian MC estimate of T_m(f_1..f_m)(x); supports must be bounded."""
    kernel = mlinear_kernel(space.Q, m)
    samplers = [_support_sampler(f, space) for f in f_list]
    d = space.dim
    x = np.asarray(x, dtype=float)

    def draw(rng, size):
        return np.concatenate([s.draw(rng, size) for s in samplers], axis=1)

    def integrand(s):
        ys = [s[:, i * d:(i + 1) * d] for i in range(m)]
        val = kernel.mlinear_pointwise(x, ys)
        for f, y in zip(f_list, ys):
            val = val * f(y)
        return val

    measure = math.prod(s.measure for s in samplers)
    return mc_integrate(integrand, Sampler(draw, measure), mc or MCSpec())


# -- multilinear Hilbert operator -------------------------------------------

def apply_mlinear_result(m, f_list, x_radius, space, quad=None):
    """T_m(f_1..f_m) at radius r by nested quadrature (m <= 3).

    T_m = omega_Q^m int prod f_i(r rho_i) rho_i^(Q-1) / (1 + sum rho_i^Q)^m drho.
    """
    if len(f_list) != m:
        raise InvalidArgumentError("need exactly m input functions")
    if m > 3:
        raise InvalidArgumentError("nested quadrature supports m <= 3; use apply_mlinear_general")
    for f in f_list:
        _require_radial(f)
    quad = quad or QuadratureSpec(rel_tol=1e-9)
    if m == 1:
        return apply_radial_result(hilbert_kernel(space.Q), f_list[0], x_radius, space, quad)
    Q = space.Q
    r = float(x_radius)
    kernel = mlinear_kernel(Q, m)
    Rs = [f.radial for f in f_list]

    def integrand(*rho):
        val = kernel.radial_profile(*rho)
        for R, rk in zip(Rs, rho):
            val = val * R(r * rk) * rk ** (Q - 1)
        return val

    ranges = [_inner_range(f, r) for f in f_list]
    singular = []
    for i, (f, (a, b)) in enumerate(zip(f_list, ranges)):
        left = f.origin_power + Q - 1 if a == 0.0 and f.origin_power is not None else None
        right = None
        if i == m - 1 and b == math.inf and f.tail_power is not None:
            # innermost variable: the kernel alone decays like rho^(-mQ)
            right = f.tail_power + Q - 1 - m * Q
        singular.append((left, right))

    def scale_points(i):
        a, b = ranges[i]

        # the kernel turns over where rho_i^Q ~ 1 + sum of the outer rho^Q
        def pts(*outer):
            s = (1.0 + sum(o ** Q for o in outer)) ** (1.0 / Q)
            return tuple(p for p in sorted({1.0, s}) if a < p < b)
        return pts

    points = [scale_points(i) for i in range(m)]
    res = integrate_nested(integrand, ranges, quad, points=points, singular=singular)
    return res.scaled(space.omega_Q ** m)


def apply_mlinear(m, f_list, x_radius, space, quad=None):
    return apply_mlinear_result(m, f_list, x_radius, space, quad).value


def mlinear_image_function(m, f_list, space, quad=None, tracker=None):
    def profile(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty(r.shape)
        for i, rk in enumerate(r.ravel()):
            res = apply_mlinear_result(m, f_list, rk, space, quad)
            if tracker is not None:
                tracker.note(res)
            out.flat[i] = res.value
        return out

    origin, tail = mlinear_image_powers(f_list, space.Q)
    return radial_function(profile, (0.0, math.inf), origin, tail)


def mlinear_image_powers(f_list, Q):
    """Power laws of T_m(f_1..f_m) at 0 and infinity.

    T_m is homogeneous: inputs ~ r^a_i near 0 give r^(sum a_i); a bounded
    image near 0 corresponds to exponent 0.  At infinity the kernel gives
    r^(-mQ) unless the inputs decay slower in total.
    """
    m = len(f_list)
    origin = tail = 0.0
    for f in f_list:
        lo, hi = f.support
        a0 = math.inf if lo > 0 else f.origin_power
        ainf = -math.inf if hi < math.inf else f.tail_power
        origin = None if origin is None or a0 is None else origin + a0
        tail = None if tail is None or ainf is None else tail + ainf
    if origin is not None:
        origin = min(origin, 0.0)
    if tail is not None:
        tail = max(tail, -m * Q)
    return origin, tail


# -- operator ratios ---------------------------------------------------------

@dataclass(frozen=True)
class RatioResult:
    ratio: float
    error: float
    output_norm: float
    input_norm: float


def operator_ratio_result(kernel, f, params_in, params_out, space, quad=None,
                          inner_quad=None):
    """||Tf||_{out} / prod ||f_i||_{in_i} with a combined error estimate.

    For a multilinear kernel pass lists for ``f`` and ``params_in``.
    """
    quad = quad or QuadratureSpec(rel_tol=1e-9)
    tracker = _ErrorTracker()
    if kernel.kind == MLINEAR and kernel.m > 1:
        fs = list(f)
        pins = list(params_in)
        if len(fs) != kernel.m or len(pins) != kernel.m:
            raise InvalidArgumentError("need m functions and m input exponents")
        image = mlinear_image_function(kernel.m, fs, space, inner_quad, tracker)
    else:
        fs = [f]
        pins = [params_in]
        image = image_function(kernel, f, space, inner_quad or INNER_QUAD, tracker)
    den = 1.0
    den_rel = 0.0
    for fi, pi in zip(fs, pins):
        r = mixed_norm_result(fi, pi, space, quad=quad)
        den *= r.value
        den_rel += r.relative_error
    if den == 0:
        raise DomainError("input norm vanishes; the ratio is undefined")
    out = mixed_norm_result(image, params_out, space, quad=quad)
    ratio = out.value / den
    rel = out.relative_error + den_rel + tracker.worst
    return RatioResult(ratio, ratio * rel, out.value, den)


def operator_ratio(kernel, f, params_in, params_out, space, quad=None):
    return operator_ratio_result(kernel, f, params_in, params_out, space, quad).ratio


__all__ = [
    "KernelSpec", "RatioResult", "apply_general", "apply_mlinear", "apply_mlinear_general",
    "apply_radial", "custom_kernel", "hilbert_kernel", "hlp_kernel", "image_function",
    "kernel_by_name", "mlinear_kernel", "operator_ratio", "operator_ratio_result",
    "spherical_mean_general"
]
