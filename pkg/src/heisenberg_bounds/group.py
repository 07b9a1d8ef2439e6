"""Arithmetic on the Heisenberg group H^n = R^{2n} x R.

Points are stored as 2n+1 coordinates ``(z_1..z_2n, t)``.  Every function
accepts either a :class:`GroupPoint` or an array whose last axis holds the
coordinates (batches are broadcast), and returns the same kind.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError, InvalidArgumentError
from .numerics.montecarlo import Sampler
from .numerics.quadrature import QuadratureSpec, integrate_1d
from .numerics.special import beta_fn, gamma_fn, sphere_area


def lebesgue_ball_volume(n):
    """Lebesgue measure of the unit Koranyi ball in R^{2n+1}.

    |z|^4 + t^2 <= 1 gives vol = area(S^{2n-1}) int_0^1 rho^{2n-1} 2 sqrt(1 - rho^4) drho,
    and u = rho^4 turns the radial integral into B(n/2, 3/2) / 2.
    """
    if n < 1:
        raise InvalidArgumentError("n must be a positive integer")
    return sphere_area(2 * n) * 0.5 * beta_fn(n / 2.0, 1.5)


def literature_ball_volume(n):
    """The closed form 2 pi^{n+1/2} Gamma(n/2) / ((n+1) Gamma(n) Gamma((n+1)/2)).

    It is twice :func:`lebesgue_ball_volume` for every n; kept for reporting.
    """
    return (2.0 * math.pi ** (n + 0.5) * gamma_fn(n / 2.0)
            / ((n + 1) * gamma_fn(n) * gamma_fn((n + 1) / 2.0)))


def ball_volume_quadrature(n, spec=None):
    """One-dimensional quadrature of the ball volume (independent of Beta)."""
    spec = (spec or QuadratureSpec(rel_tol=1e-13)).with_endpoints(None, 0.5)
    res = integrate_1d(lambda r: r ** (2 * n - 1) * 2.0 * np.sqrt(np.maximum(1.0 - r**4, 0.0)),
                       0.0, 1.0, spec)
    return res.scaled(sphere_area(2 * n))


@dataclass(frozen=True)
class BallVolume:
    lebesgue: float
    literature: float

    @property
    def ratio(self):
        return self.literature / self.lebesgue


def unit_ball_volume(n):
    return BallVolume(lebesgue_ball_volume(n), literature_ball_volume(n))


@dataclass(frozen=True)
class HeisenbergSpace:
    """Ambient constants of H^n.

    ``omega_Q`` is the total mass of the polar sphere measure, fixed by
    dy = r^{Q-1} dr dsigma, i.e. ``Q * ball_volume``.  ``omega_perturbation``
    multiplies it by ``1 + omega_perturbation`` and exists only to check
    that verification suites detect a wrong constant.
    """

    n: int
    omega_perturbation: float = 0.0
    Q: int = field(init=False)
    ball_volume: float = field(init=False)
    omega_Q: float = field(init=False)
    literature_omega_Q: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidArgumentError("n must be a positive integer")
        vol = lebesgue_ball_volume(self.n)
        object.__setattr__(self, "Q", 2 * self.n + 2)
        object.__setattr__(self, "ball_volume", vol)
        object.__setattr__(self, "omega_Q", (1.0 + self.omega_perturbation) * self.Q * vol)
        object.__setattr__(self, "literature_omega_Q", self.Q * literature_ball_volume(self.n))

    @property
    def dim(self):
        return 2 * self.n + 1

    def zero(self):
        return GroupPoint((0.0,) * self.dim)

    def unit_point(self):
        """First horizontal coordinate direction; Koranyi norm 1."""
        return GroupPoint((1.0,) + (0.0,) * (self.dim - 1))


@dataclass(frozen=True)
class GroupPoint:
    coords: tuple

    def __post_init__(self):
        c = tuple(self.coords)
        if len(c) < 3 or len(c) % 2 == 0:
            raise InvalidArgumentError("a point of H^n has 2n+1 >= 3 coordinates")
        object.__setattr__(self, "coords", c)

    @property
    def n(self):
        return (len(self.coords) - 1) // 2

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __matmul__(self, other):
        return group_mul(self, other)

    def norm(self):
        return koranyi_norm(self)


@dataclass(frozen=True)
class PolarPoint:
    r: float
    theta: GroupPoint


def _unwrap(*xs):
    wrap = any(isinstance(x, GroupPoint) for x in xs)
    arrs = [np.asarray(x.coords if isinstance(x, GroupPoint) else x) for x in xs]
    for a in arrs:
        if a.ndim == 0 or a.shape[-1] < 3 or a.shape[-1] % 2 == 0:
            raise InvalidArgumentError("coordinate axis must have length 2n+1")
    if len({a.shape[-1] for a in arrs}) > 1:
        raise InvalidArgumentError("points belong to different Heisenberg groups")
    return wrap, arrs


def _rewrap(wrap, arr):
    return GroupPoint(tuple(arr.tolist())) if wrap else arr


def group_mul(x, y):
    """x o y = (z + z', t + t' + 2 sum_j (y_j x_{n+j} - x_j y_{n+j}))."""
    wrap, (a, b) = _unwrap(x, y)
    n = (a.shape[-1] - 1) // 2
    twist = 2 * np.sum(b[..., :n] * a[..., n:2 * n] - a[..., :n] * b[..., n:2 * n], axis=-1)
    out = a + b
    out[..., -1] = out[..., -1] + twist
    return _rewrap(wrap, out)


def inverse(x):
    wrap, (a,) = _unwrap(x)
    return _rewrap(wrap, -a)


def dilate(r, x):
    if not r > 0:
        raise InvalidArgumentError(f"dilation factor must be positive, got {r}")
    wrap, (a,) = _unwrap(x)
    out = a * r
    out[..., -1] = a[..., -1] * r * r
    return _rewrap(wrap, out)


def koranyi_norm(x):
    """((sum z_i^2)^2 + t^2)^(1/4); scalar for a point, array for a batch."""
    _, (a,) = _unwrap(x)
    a = np.asarray(a, dtype=float)
    # scale so that squaring neither underflows nor overflows
    s = np.maximum(np.max(np.abs(a[..., :-1]), axis=-1), np.sqrt(np.abs(a[..., -1])))
    safe = np.where(s > 0, s, 1.0)
    z = a[..., :-1] / safe[..., None]
    t = a[..., -1] / safe / safe
    val = safe * np.sqrt(np.hypot(np.sum(z * z, axis=-1), t))
    val = np.where(s > 0, val, 0.0)
    return float(val) if val.ndim == 0 else val


def distance(p, q):
    """Left-invariant distance |q^{-1} o p|_h."""
    return koranyi_norm(group_mul(inverse(q), p))


def rotate_horizontal(R, x, tol=1e-10):
    """Apply an orthogonal 2n x 2n matrix to the horizontal part, t fixed."""
    wrap, (a,) = _unwrap(x)
    R = np.asarray(R, dtype=float)
    m = a.shape[-1] - 1
    if R.shape != (m, m):
        raise InvalidArgumentError(f"rotation must be {m}x{m}")
    if np.max(np.abs(R.T @ R - np.eye(m))) > tol:
        raise InvalidArgumentError("matrix is not orthogonal")
    out = np.array(a, dtype=float)
    out[..., :-1] = a[..., :-1] @ R.T
    return _rewrap(wrap, out)


def polar_decompose(x):
    """x = delta_r(theta) with r = |x|_h and |theta|_h = 1."""
    if isinstance(x, GroupPoint):
        r = koranyi_norm(x)
        if r == 0:
            raise DomainError("the identity has no polar decomposition")
        return PolarPoint(r, dilate(1.0 / r, x))
    r, theta = polar_decompose_array(x)
    return r, theta


def polar_decompose_array(points):
    a = np.asarray(points, dtype=float)
    single = a.ndim == 1
    a2 = np.atleast_2d(a)
    r = koranyi_norm(a2)
    if np.any(r == 0):
        raise DomainError("the identity has no polar decomposition")
    theta = a2 / r[:, None]
    theta[:, -1] = a2[:, -1] / r**2
    return (float(r[0]), theta[0]) if single else (r, theta)


def polar_compose(polar_or_r, theta=None):
    if isinstance(polar_or_r, PolarPoint):
        return dilate(polar_or_r.r, polar_or_r.theta)
    r = np.asarray(polar_or_r, dtype=float)
    th = np.array(theta, dtype=float)
    if th.ndim == 1:
        return dilate(float(r), th)
    out = th * r[:, None]
    out[:, -1] = th[:, -1] * r * r
    return out


def random_rotation(rng, n):
    """Haar-random orthogonal 2n x 2n matrix."""
    a = rng.standard_normal((2 * n, 2 * n))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diag(r))


# -- sampling ---------------------------------------------------------------

def draw_ball(rng, space, size):
    """Uniform (Lebesgue) points of the unit Koranyi ball, by box rejection."""
    dim = space.dim
    accept = space.ball_volume / 2.0 ** dim
    out = np.empty((size, dim))
    have = 0
    while have < size:
        want = size - have
        batch = int(want / accept * 1.1) + 16
        cand = rng.uniform(-1.0, 1.0, (batch, dim))
        z2 = np.sum(cand[:, :-1] ** 2, axis=1)
        ok = cand[z2 * z2 + cand[:, -1] ** 2 <= 1.0]
        take = min(want, ok.shape[0])
        out[have:have + take] = ok[:take]
        have += take
    return out


def sample_ball(space, count, seed):
    """``count`` reproducible uniform points of the unit ball, shape (count, 2n+1)."""
    if count < 0:
        raise InvalidArgumentError("count must be nonnegative")
    if count == 0:
        return np.empty((0, space.dim))
    return draw_ball(np.random.default_rng(seed), space, count)


def draw_sphere(rng, space, size):
    """Points of the unit Koranyi sphere distributed as sigma / omega_Q.

    Radial projection of uniform ball points: under dy = r^{Q-1} dr dsigma
    the angular part of a uniform ball sample has law sigma / omega_Q.
    """
    _, theta = polar_decompose_array(draw_ball(rng, space, size))
    return theta


def draw_annulus(rng, space, r_min, r_max, size):
    """Uniform points of {r_min <= |y|_h <= r_max} via radius inversion."""
    Q = space.Q
    u = rng.random(size)
    rho = (r_min**Q + u * (r_max**Q - r_min**Q)) ** (1.0 / Q)
    return polar_compose(rho, draw_sphere(rng, space, size))


def annulus_sampler(space, r_min, r_max):
    if not (0 <= r_min < r_max < math.inf):
        raise InvalidArgumentError("annulus needs 0 <= r_min < r_max < inf")
    measure = space.ball_volume * (r_max**space.Q - r_min**space.Q)
    return Sampler(lambda rng, size: draw_annulus(rng, space, r_min, r_max, size), measure)


def ball_sampler(space, radius=1.0):
    return annulus_sampler(space, 0.0, radius)
