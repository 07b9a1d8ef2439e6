"""Gamma, log-Gamma and Beta functions.

Lanczos approximation (g = 7, nine terms) on x >= 1/2 and the reflection
formula below.  Relative accuracy is a few ulps times |x| on (0, 50].
"""

import math

from ..errors import DomainError

_G = 7.0
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _check_pole(x):
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"Gamma has a pole at x = {x}")


def _lanczos_series(x):
    # x is the shifted argument (original minus one)
    acc = _COEF[0]
    for i in range(1, len(_COEF)):
        acc += _COEF[i] / (x + i)
    return acc


def gamma_fn(x):
    """Gamma function for real ``x`` that is not a nonpositive integer."""
    x = float(x)
    _check_pole(x)
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    if x == math.floor(x) and x <= 23.0:
        return float(math.factorial(int(x) - 1))
    xm = x - 1.0
    t = xm + _G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (xm + 0.5) * math.exp(-t) * _lanczos_series(xm)


def log_gamma(x):
    """log|Gamma(x)|."""
    x = float(x)
    _check_pole(x)
    if x < 0.5:
        return math.log(math.pi / abs(math.sin(math.pi * x))) - log_gamma(1.0 - x)
    xm = x - 1.0
    t = xm + _G + 0.5
    return _HALF_LOG_TWO_PI + (xm + 0.5) * math.log(t) - t + math.log(_lanczos_series(xm))


def beta_fn(a, b):
    """Euler Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0."""
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"Beta requires positive arguments, got ({a}, {b})")
    if a + b < 150.0:
        return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b)
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


def sphere_area(dim):
    """Surface area of the Euclidean unit sphere S^{dim-1} in R^dim."""
    return 2.0 * math.pi ** (dim / 2.0) / gamma_fn(dim / 2.0)
