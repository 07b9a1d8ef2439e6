"""Extremizer ratio sweeps, property suites and report files.

A sweep evaluates ||T f_eps|| / ||f_eps|| on the regularized power family
for a decreasing grid of eps and compares it with the sharp constant.  The
property suites re-check the identities and inequalities the constants rest
on (group law, polar volume, norm reduction, radialization, Minkowski
bound, the I_m recursion), each against an independent route.
"""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
import io
import json
import math
import os
from pathlib import Path

import numpy as np

from .constants import (
    ConstantRequest, I_m, I_m_quadrature, I_m_recursion, OMEGA_CONVENTION,
    DM_PREFACTOR_NOTE, constant_Dm, constant_E, sharp_constant,
)
from .errors import AccuracyError, DivergenceError, InvalidArgumentError
from .group import (
    HeisenbergSpace, ball_volume_quadrature, dilate, distance, group_mul, inverse,
    koranyi_norm, lebesgue_ball_volume,
)
from .mixed_norm import (
    MixedNormParams, angular_mean, extremizer_family, mixed_norm_result, product_function,
    radial_function, radialize,
)
from .numerics.montecarlo import MCSpec, block_rng, box_sampler, mc_integrate
from .numerics.quadrature import QuadratureSpec
from .operators import (
    HILBERT, HLP, MLINEAR, apply_general, apply_radial_result, hilbert_kernel, hlp_kernel,
    image_function, kernel_by_name, operator_ratio_result, spherical_mean_general,
)

DEFAULT_EPS_GRID = (0.5, 0.2, 0.1, 0.05, 0.02, 0.01)
OUT_DIR_ENV = "HEISENBERG_BOUNDS_OUT"
CSV_COLUMNS = ("experiment", "epsilon", "ratio", "ratio_error", "constant",
               "ratio_over_constant")
HOMOGENEITY_NOTE = "kernels are homogeneous of degree -Q (degree -n breaks the dilation step)"
SUITES = ("group-axioms", "volume", "norm-reduction", "radialization-holder",
          "radialization-commutation", "minkowski-bound", "im-recursion")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 1
    operator: str = HILBERT
    p: float = 2.0
    p_bar_in: float = 2.0
    p_bar_out: float = 2.0
    m: int = 1
    p_list: tuple = None
    eps_grid: tuple = DEFAULT_EPS_GRID
    side: str = "inner"
    seed: int = 12345
    samples: int = 65536
    tol: float = 1e-9
    jobs: int = 1
    suites: tuple = None
    omega_fault: float = 0.0
    volume_samples: int = 1_000_000
    group_samples: int = 10_000
    minkowski_draws: int = 50
    product_draws: int = 20
    im_draws: int = 100
    im_quadrature_draws: int = 10

    def __post_init__(self):
        grid = tuple(float(e) for e in self.eps_grid)
        object.__setattr__(self, "eps_grid", grid)
        if any(e <= 0 for e in grid):
            raise InvalidArgumentError("epsilon grid must be positive")
        if any(b >= a for a, b in zip(grid, grid[1:])):
            raise InvalidArgumentError("epsilon grid must be strictly decreasing")
        if self.n < 1 or int(self.n) != self.n:
            raise InvalidArgumentError("n must be a positive integer")
        if self.operator not in (HILBERT, HLP, MLINEAR):
            raise InvalidArgumentError(f"unknown operator {self.operator!r}")
        if self.side not in ("inner", "outer"):
            raise InvalidArgumentError(f"side must be inner or outer, got {self.side!r}")
        if self.jobs < 1:
            raise InvalidArgumentError("jobs must be >= 1")
        if not 0 < self.tol < 1:
            raise InvalidArgumentError("tol must lie in (0, 1)")
        MixedNormParams(self.p, self.p_bar_in)
        MixedNormParams(self.p, self.p_bar_out)
        if self.p_list is not None:
            object.__setattr__(self, "p_list", tuple(float(v) for v in self.p_list))
        if self.suites is not None:
            suites = tuple(self.suites)
            unknown = [s for s in suites if s not in SUITES]
            if unknown:
                raise InvalidArgumentError(f"unknown suite(s) {unknown}; choose from {SUITES}")
            object.__setattr__(self, "suites", suites)
        # build the request now so that invalid exponents fail early
        self.constant_request()

    def space(self):
        return HeisenbergSpace(int(self.n), omega_perturbation=self.omega_fault)

    def quad(self):
        return QuadratureSpec(rel_tol=self.tol)

    def mc(self, seed_offset=0):
        return MCSpec(sample_count=self.samples, seed=self.seed + seed_offset)

    def input_exponents(self):
        if self.operator == MLINEAR and self.m > 1:
            if self.p_list is None:
                return (self.p * self.m,) * self.m
            return self.p_list
        return (self.p,)

    def constant_request(self):
        m = self.m if self.operator == MLINEAR else 1
        p_list = self.input_exponents() if m > 1 else None
        return ConstantRequest(self.space(), self.p, self.p_bar_in, self.p_bar_out,
                               self.operator, m, p_list)

    @property
    def experiment_name(self):
        op = f"mlinear{self.m}" if self.operator == MLINEAR else self.operator
        return f"{op}_n{self.n}_p{self.p:g}_{self.side}"


# -- sweeps ----------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    ratio: float
    ratio_error: float
    constant: float
    ratio_over_constant: float
    valid: bool = True
    message: str = ""


@dataclass(frozen=True)
class RatioSweep:
    experiment: str
    rows: tuple
    constant: float
    extrapolated_limit: float
    monotone_flag: bool
    bounded_flag: bool


def richardson_limit(eps, values):
    """Value at eps = 0 of the polynomial through the last (up to) three points."""
    eps = list(eps)[-3:]
    values = list(values)[-3:]
    if not values:
        return math.nan
    total = 0.0
    for i, (ei, vi) in enumerate(zip(eps, values)):
        w = 1.0
        for j, ej in enumerate(eps):
            if j != i:
                w *= ej / (ej - ei)
        total += w * vi
    return total


def _sweep_point(cfg, eps):
    """Ratio on the extremizer family at one eps; picklable for worker processes."""
    space = cfg.space()
    quad = cfg.quad()
    p_in = [MixedNormParams(pi, cfg.p_bar_in) for pi in cfg.input_exponents()]
    p_out = MixedNormParams(cfg.p, cfg.p_bar_out)
    fs = [extremizer_family(space, pi.p, eps, cfg.side) for pi in p_in]
    if cfg.operator == MLINEAR and cfg.m > 1:
        kernel = kernel_by_name(MLINEAR, space.Q, cfg.m)
        res = operator_ratio_result(kernel, fs, p_in, p_out, space, quad)
    else:
        kernel = kernel_by_name(cfg.operator, space.Q)
        res = operator_ratio_result(kernel, fs[0], p_in[0], p_out, space, quad)
    return res.ratio, res.error


def _safe_point(args):
    cfg, eps = args
    try:
        ratio, err = _sweep_point(cfg, eps)
        return ratio, err, ""
    except (DivergenceError, AccuracyError) as exc:
        return math.nan, math.nan, f"{type(exc).__name__}: {exc}"


def run_ratio_sweep(cfg):
    """Sweep the extremizer family over ``cfg.eps_grid`` (rows in grid order)."""
    constant = sharp_constant(cfg.constant_request()).radial_operator_value
    jobs = [(cfg, eps) for eps in cfg.eps_grid]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            points = list(pool.map(_safe_point, jobs))
    else:
        points = [_safe_point(j) for j in jobs]
    rows = []
    for eps, (ratio, err, msg) in zip(cfg.eps_grid, points):
        rows.append(SweepRow(eps, ratio, err, constant, ratio / constant, not msg, msg))
    valid = [r for r in rows if r.valid]
    limit = richardson_limit([r.epsilon for r in valid], [r.ratio for r in valid])
    monotone = all(b.ratio >= a.ratio - (a.ratio_error + b.ratio_error)
                   for a, b in zip(valid, valid[1:]))
    bounded = all(r.ratio <= constant + 3 * r.ratio_error + 1e-12 * constant for r in valid)
    return RatioSweep(cfg.experiment_name, tuple(rows), constant, limit, monotone, bounded)


# -- random test functions -------------------------------------------------------

def random_radial_function(rng, Q, p):
    """A truncated radial function with a power law at 0 when its support reaches 0."""
    at_origin = rng.random() < 0.5
    r0 = 0.0 if at_origin else float(rng.uniform(0.1, 1.0))
    r1 = r0 + float(rng.uniform(0.5, 3.0))
    a = float(rng.uniform(-0.8 * Q / p, 1.0)) if at_origin else float(rng.uniform(-2.0, 2.0))
    c = float(rng.uniform(0.0, 0.9))
    w = float(rng.uniform(0.0, 5.0))
    b = float(rng.uniform(0.0, 1.0))

    def profile(r):
        r = np.asarray(r, dtype=float)
        return r ** a * (1.0 + c * np.cos(w * r)) * np.exp(-b * r)

    return radial_function(profile, (r0, r1), origin_power=a if at_origin else None)


def random_product_function(rng, space):
    """R(r) A(theta) with a polynomial angular part; mean of A over sigma is ``c0``."""
    d = space.dim
    c0 = float(rng.uniform(-1.0, 1.0))
    lin = rng.normal(size=d)
    quad = float(rng.uniform(-1.0, 1.0))
    r0 = float(rng.uniform(0.0, 0.5))
    r1 = r0 + float(rng.uniform(0.5, 2.0))
    a = float(rng.uniform(0.0, 2.0))

    def angular(theta):
        theta = np.asarray(theta, dtype=float)
        # theta_i, t and z_1 * z_2 all average to zero over the sphere
        return c0 + theta @ lin + quad * theta[..., 0] * theta[..., 1]

    def profile(r):
        return np.asarray(r, dtype=float) ** a * np.exp(-np.asarray(r, dtype=float))

    return product_function(profile, angular, (r0, r1))


# -- property suites ------------------------------------------------------------

@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def check(self, ok, message):
        self.checks += 1
        if not ok:
            self.failures.append(message)


@dataclass(frozen=True)
class PropertyReport:
    results: tuple

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def by_name(self, name):
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def _points(rng, count, n, scale=1.0):
    return rng.normal(scale=scale, size=(count, 2 * n + 1))


def suite_group_axioms(cfg):
    res = SuiteResult("group-axioms")
    rng = block_rng(cfg.seed, 101)
    n, N = int(cfg.n), cfg.group_samples
    # dyadic points: the group law is exact on them, so associativity is exact too
    x, y, z = (rng.integers(-64, 65, size=(N, 2 * n + 1)) / 8.0 for _ in range(3))
    lhs = group_mul(group_mul(x, y), z)
    rhs = group_mul(x, group_mul(y, z))
    scale = 1 + koranyi_norm(x) + koranyi_norm(y) + koranyi_norm(z)
    res.check(np.all(distance(lhs, rhs) <= 1e-10 * scale), "associativity (dyadic points)")
    x, y, z, a = (_points(rng, N, n) for _ in range(4))
    lhs = group_mul(group_mul(x, y), z)
    rhs = group_mul(x, group_mul(y, z))
    mag = (1 + koranyi_norm(x) + koranyi_norm(y) + koranyi_norm(z)) ** 2
    res.check(np.all(np.max(np.abs(lhs - rhs), axis=-1) <= 1e-12 * mag),
              "associativity (coordinates)")
    zero = np.zeros_like(x)
    res.check(np.array_equal(group_mul(x, zero), x) and np.array_equal(group_mul(zero, x), x),
              "identity")
    res.check(np.max(np.abs(group_mul(x, inverse(x)))) <= 1e-12 * np.max(np.abs(x)),
              "inverse")
    d_xy = distance(x, y)
    d_axy = distance(group_mul(a, x), group_mul(a, y))
    res.check(np.all(np.abs(d_axy - d_xy) <= 1e-10 * d_xy), "left invariance")
    nx = koranyi_norm(x)
    for r in np.geomspace(1e-3, 1e3, 13):
        res.check(np.all(np.abs(koranyi_norm(dilate(r, x)) - r * nx) <= 1e-12 * r * nx),
                  f"norm homogeneity r={r:g}")
    res.check(np.all(distance(x, z) <= distance(x, y) + distance(y, z) + 1e-12),
              "triangle inequality")
    return res


def volume_mc(space, samples, seed):
    """Cartesian MC estimate of the unit-ball volume over the box |z_i|, |t| <= 1."""
    dim = space.dim
    sampler = box_sampler(-np.ones(dim), np.ones(dim))
    return mc_integrate(lambda y: (koranyi_norm(y) <= 1.0).astype(float), sampler,
                        MCSpec(sample_count=samples, seed=seed, chunk_count=4))


def suite_volume(cfg):
    res = SuiteResult("volume")
    space = cfg.space()
    closed = lebesgue_ball_volume(space.n)
    quad = ball_volume_quadrature(space.n).value
    res.check(abs(quad - closed) <= 1e-10 * closed, "closed form vs 1-D quadrature")
    mc = volume_mc(space, cfg.volume_samples, cfg.seed)
    res.check(abs(mc.value - closed) <= 3 * mc.error_estimate, "closed form vs Cartesian MC")
    # polar identity |B(0,1)| = omega_Q / Q ties omega_Q to the Cartesian measure
    res.check(abs(space.omega_Q / space.Q - mc.value) <= 3 * mc.error_estimate,
              "omega_Q / Q vs Cartesian MC")
    # measure scaling |delta_r B| = r^Q |B| from the same samples
    r = 0.5
    half = mc_integrate(lambda y: (koranyi_norm(y) <= r).astype(float),
                        box_sampler(-np.ones(space.dim), np.ones(space.dim)),
                        MCSpec(sample_count=cfg.volume_samples, seed=cfg.seed + 1))
    res.check(abs(half.value - r ** space.Q * closed) <= 3 * half.error_estimate,
              "dilation measure scaling")
    return res


def suite_norm_reduction(cfg):
    res = SuiteResult("norm-reduction")
    space = cfg.space()
    rng = block_rng(cfg.seed, 103)
    quad = QuadratureSpec(rel_tol=1e-11)
    for i in range(10):
        f = random_radial_function(rng, space.Q, cfg.p)
        pb = float(rng.uniform(1.0, 4.0))
        params = MixedNormParams(cfg.p, pb)
        direct = mixed_norm_result(f, params, space, quad=quad).value
        shells = mixed_norm_result(f, params, space, method="shells",
                                   mc=MCSpec(sample_count=256, seed=cfg.seed)).value
        res.check(abs(direct - shells) <= 1e-8 * direct, f"radial vs shell path #{i}")
        lam = float(rng.uniform(0.3, 3.0))
        scaled = mixed_norm_result(f.dilated(lam), params, space, quad=quad).value
        res.check(abs(scaled - lam ** (-space.Q / cfg.p) * direct) <= 1e-8 * direct,
                  f"dilation scaling #{i}")
        other = mixed_norm_result(f, MixedNormParams(cfg.p, 1.0 + pb), space, quad=quad).value
        expected = direct * space.omega_Q ** (1.0 / (1.0 + pb) - 1.0 / pb)
        res.check(abs(other - expected) <= 1e-10 * expected, f"pbar enters via omega_Q #{i}")
    return res


def _holder_pair(f, params, space, mc_f, mc_g):
    """Norm of f and of its radialization from independent sphere samples."""
    nf = mixed_norm_result(f, params, space, mc=mc_f)
    g = radialize(f, space, mc_g)
    ng = mixed_norm_result(g, params, space)
    # radialize keeps no error; recover it from the MC mean it used
    m = angular_mean(f.angular, space, mc_g)
    g_err = ng.value * (m.error_estimate / abs(m.value)) if m.value else 0.0
    return nf, ng, g_err


def suite_radialization_holder(cfg):
    res = SuiteResult("radialization-holder")
    space = cfg.space()
    rng = block_rng(cfg.seed, 104)
    for i in range(cfg.product_draws):
        f = random_product_function(rng, space)
        params = MixedNormParams(cfg.p, float(rng.uniform(1.0, 4.0)))
        nf, ng, g_err = _holder_pair(f, params, space, cfg.mc(1 + 2 * i), cfg.mc(2 + 2 * i))
        tol = 3 * (nf.error_estimate + ng.error_estimate + g_err)
        res.check(ng.value <= nf.value + tol, f"||radialize f|| <= ||f|| #{i}")
    return res


def suite_radialization_commutation(cfg):
    res = SuiteResult("radialization-commutation")
    space = cfg.space()
    rng = block_rng(cfg.seed, 105)
    kernels = (hilbert_kernel(space.Q), hlp_kernel(space.Q))
    for i in range(cfg.product_draws):
        f = random_product_function(rng, space)
        mean = angular_mean(f.angular, space, cfg.mc(200 + i))
        g = radialize(f, space, cfg.mc(200 + i))
        params = MixedNormParams(cfg.p, cfg.p_bar_in)
        nf = mixed_norm_result(f, params, space, mc=cfg.mc(400 + i))
        ng = mixed_norm_result(g, params, space)
        for kernel in kernels:
            for j, r in enumerate((0.5, 1.0, 2.0)):
                mc = MCSpec(sample_count=cfg.samples, seed=cfg.seed + 1000 * (i + 1) + j)
                lhs = spherical_mean_general(kernel, f, r, space, mc)
                rhs = apply_radial_result(kernel, g, r, space)
                g_err = abs(rhs.value) * mean.error_estimate / max(abs(mean.value), 1e-300)
                tol = 3 * (lhs.error_estimate + g_err + rhs.error_estimate)
                res.check(abs(lhs.value - rhs.value) <= tol,
                          f"sphere mean of Tf = T(radialize f), {kernel.name} #{i} r={r}")
            # Tf = Tg for radial kernels, so the ratio can only grow under radialization
            if abs(mean.value) > 5 * mean.error_estimate:
                out = mixed_norm_result(image_function(kernel, g, space), params, space,
                                        quad=QuadratureSpec(rel_tol=1e-7))
                g_rel = mean.error_estimate / abs(mean.value)
                r_f = out.value / nf.value
                r_g = out.value / ng.value
                tol = 3 * r_f * (nf.relative_error + ng.relative_error + g_rel
                                 + out.relative_error)
                res.check(r_f <= r_g + tol, f"ratio(f) <= ratio(radialize f), {kernel.name} #{i}")
    return res


def suite_minkowski_bound(cfg):
    res = SuiteResult("minkowski-bound")
    space = cfg.space()
    rng = block_rng(cfg.seed, 106)
    quad = QuadratureSpec(rel_tol=1e-7)
    params_in = MixedNormParams(cfg.p, cfg.p_bar_in)
    params_out = MixedNormParams(cfg.p, cfg.p_bar_out)
    for kernel in (hilbert_kernel(space.Q), hlp_kernel(space.Q)):
        req = ConstantRequest(space, cfg.p, cfg.p_bar_in, cfg.p_bar_out, kernel.kind)
        const = sharp_constant(req).closed_form_value
        for i in range(cfg.minkowski_draws):
            f = random_radial_function(rng, space.Q, cfg.p)
            r = operator_ratio_result(kernel, f, params_in, params_out, space, quad)
            res.check(r.ratio <= const + 3 * r.error + 1e-9 * const,
                      f"||Tf|| <= C ||f||, {kernel.name} #{i}: ratio/C = {r.ratio / const:.6f}")
        # the radial reduction must agree with a full Cartesian evaluation of Tf
        for i in range(3):
            f = random_radial_function(rng, space.Q, cfg.p)
            x = np.zeros(space.dim)
            x[0] = float(rng.uniform(0.5, 2.0))
            mc = apply_general(kernel, f, x, space,
                               MCSpec(sample_count=2 ** 20, seed=cfg.seed + 50 + i))
            rad = apply_radial_result(kernel, f, x[0], space)
            res.check(abs(mc.value - rad.value) <= 3 * mc.error_estimate + rad.error_estimate,
                      f"Cartesian MC vs radial reduction, {kernel.name} #{i}")
    return res


def suite_im_recursion(cfg):
    res = SuiteResult("im-recursion")
    rng = block_rng(cfg.seed, 107)
    draws = [random_im_parameters(rng) for _ in range(cfg.im_draws)]
    for k, (a, betas) in enumerate(draws):
        closed = I_m(a, betas)
        res.check(abs(I_m_recursion(a, betas) - closed) <= 1e-11 * closed,
                  f"recursion #{k} a={a:.4g}")
        res.check(abs(I_m(a, betas[::-1]) - closed) <= 1e-12 * closed, f"symmetry #{k}")
        if k < cfg.im_quadrature_draws:
            q = I_m_quadrature(a, betas).value
            res.check(abs(q - closed) <= 1e-6 * closed, f"quadrature #{k}")
    space = cfg.space()
    e = constant_E(ConstantRequest(space, cfg.p, cfg.p_bar_in, cfg.p_bar_out, HILBERT))
    d1 = constant_Dm(ConstantRequest(space, cfg.p, cfg.p_bar_in, cfg.p_bar_out, MLINEAR, 1))
    res.check(abs(e.closed_form_value - d1.closed_form_value) <= 1e-12 * e.closed_form_value,
              "D_1 equals E for the Hilbert kernel")
    res.check(e.relative_gap <= 1e-6, "E closed form vs quadrature")
    return res


def random_im_parameters(rng, m=None):
    """Random (a, betas) strictly inside the convergence region of I_m."""
    m = m or int(rng.integers(1, 3))
    betas = [float(b) for b in rng.uniform(0.05, 0.95, size=m)]
    a = m - sum(betas) + float(rng.uniform(0.1, 3.0))
    return a, betas


_SUITE_FUNCS = {
    "group-axioms": suite_group_axioms,
    "volume": suite_volume,
    "norm-reduction": suite_norm_reduction,
    "radialization-holder": suite_radialization_holder,
    "radialization-commutation": suite_radialization_commutation,
    "minkowski-bound": suite_minkowski_bound,
    "im-recursion": suite_im_recursion,
}


def _run_suite(args):
    name, cfg = args
    try:
        return _SUITE_FUNCS[name](cfg)
    except (DivergenceError, AccuracyError) as exc:
        res = SuiteResult(name)
        res.check(False, f"{type(exc).__name__}: {exc}")
        return res


def run_property_suite(cfg, suites=None):
    """Run the selected suites (all by default) in a fixed order."""
    names = suites if suites is not None else (cfg.suites or SUITES)
    unknown = [s for s in names if s not in _SUITE_FUNCS]
    if unknown:
        raise InvalidArgumentError(f"unknown suite(s) {unknown}; choose from {SUITES}")
    ordered = [s for s in SUITES if s in names]
    jobs = [(name, cfg) for name in ordered]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_suite, jobs))
    else:
        results = [_run_suite(j) for j in jobs]
    return PropertyReport(tuple(results))


# -- reports -------------------------------------------------------------------

def _num(x):
    x = float(x)
    return None if math.isnan(x) or math.isinf(x) else x


def _fmt(x):
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def report_metadata(cfg):
    space = cfg.space()
    return {
        "seed": cfg.seed,
        "quadrature_rel_tol": cfg.tol,
        "mc_samples": cfg.samples,
        "n": cfg.n,
        "Q": space.Q,
        "p": cfg.p,
        "p_bar_in": cfg.p_bar_in,
        "p_bar_out": cfg.p_bar_out,
        "side": cfg.side,
        "omega_convention": OMEGA_CONVENTION,
        "omega_Q": space.omega_Q,
        "literature_omega_Q": space.literature_omega_Q,
        "literature_to_lebesgue_ratio": space.literature_omega_Q / space.omega_Q,
        "notes": [
            "literature ball-volume formula is twice the Lebesgue volume of the unit ball",
            HOMOGENEITY_NOTE,
            DM_PREFACTOR_NOTE,
            "operators map the pbar_in space to the pbar_out space",
        ],
    }


def sweep_csv(sweeps):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for sw in sweeps:
        for r in sw.rows:
            w.writerow([sw.experiment, _fmt(r.epsilon), _fmt(r.ratio), _fmt(r.ratio_error),
                        _fmt(r.constant), _fmt(r.ratio_over_constant)])
    return buf.getvalue()


def sweep_json(sweeps, metadata=None):
    doc = {
        "metadata": metadata or {},
        "experiments": [
            {
                "experiment": sw.experiment,
                "constant": _num(sw.constant),
                "extrapolated_limit": _num(sw.extrapolated_limit),
                "monotone": sw.monotone_flag,
                "bounded": sw.bounded_flag,
                "rows": [{"epsilon": _num(r.epsilon), "ratio": _num(r.ratio),
                          "ratio_error": _num(r.ratio_error), "constant": _num(r.constant),
                          "ratio_over_constant": _num(r.ratio_over_constant),
                          "valid": r.valid, "message": r.message} for r in sw.rows],
            }
            for sw in sweeps
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def emit_report(sweeps, fmt, path, metadata=None):
    """Write sweeps as CSV or JSON to ``path``; output depends only on the inputs."""
    if fmt not in ("csv", "json"):
        raise InvalidArgumentError(f"format must be csv or json, got {fmt!r}")
    text = sweep_csv(sweeps) if fmt == "csv" else sweep_json(sweeps, metadata)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _flt(x):
    return math.nan if x is None else float(x)


def load_report(path):
    """Read a JSON report back into ``(sweeps, metadata)``."""
    with open(path) as fh:
        doc = json.load(fh)
    sweeps = []
    for e in doc["experiments"]:
        rows = tuple(SweepRow(_flt(r["epsilon"]), _flt(r["ratio"]), _flt(r["ratio_error"]),
                              _flt(r["constant"]), _flt(r["ratio_over_constant"]),
                              r["valid"], r["message"]) for r in e["rows"])
        sweeps.append(RatioSweep(e["experiment"], rows, _flt(e["constant"]),
                                 _flt(e["extrapolated_limit"]), e["monotone"], e["bounded"]))
    return sweeps, doc["metadata"]


def suite_report_json(report, metadata=None):
    doc = {
        "metadata": metadata or {},
        "passed": report.passed,
        "suites": [{"name": r.name, "passed": r.passed, "checks": r.checks,
                    "failures": list(r.failures)} for r in report.results],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def default_out_dir():
    return Path(os.environ.get(OUT_DIR_ENV, "."))


__all__ = [
    "CSV_COLUMNS", "DEFAULT_EPS_GRID", "ExperimentConfig", "PropertyReport", "RatioSweep",
    "SUITES", "SuiteResult", "SweepRow", "default_out_dir", "emit_report", "load_report",
    "random_im_parameters", "random_product_function", "random_radial_function",
    "report_metadata", "richardson_limit", "run_property_suite", "run_ratio_sweep",
    "suite_report_json", "sweep_csv", "sweep_json", "volume_mc",
]
