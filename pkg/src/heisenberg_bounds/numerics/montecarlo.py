"""Reproducible Monte Carlo integration with parallel substreams.

Samples are produced in fixed-size blocks; block ``j`` draws from its own
PCG64 stream seeded by ``SeedSequence(seed, spawn_key=(j,))``.  The sample
set therefore depends only on ``(seed, sample_count)``.  ``chunk_count``
only groups consecutive blocks into work units, which may run in threads;
partial statistics are merged in chunk order, so the result is
bit-reproducible for a given chunk count and changes only by rounding when
the chunk count changes.

Integrands and samplers may be called from several threads at once and
must not mutate shared state.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from ..errors import InvalidArgumentError
from .quadrature import IntegralResult

BLOCK_SIZE = 16384


@dataclass(frozen=True)
class MCSpec:
    sample_count: int = 200_000
    seed: int = 0
    chunk_count: int = 1

    def __post_init__(self):
        if self.sample_count < 1 or self.chunk_count < 1:
            raise InvalidArgumentError("sample_count and chunk_count must be >= 1")
        if self.sample_count < self.chunk_count:
            raise InvalidArgumentError("sample_count must be >= chunk_count")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Sampler:
    """Uniform sampler on a domain of known Lebesgue ``measure``.

    ``draw(rng, size)`` returns an array whose first axis has length ``size``.
    """

    draw: object
    measure: float


def block_rng(seed, block):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, M2)
    na, ma, sa = a
    nb, mb, sb = b
    if na == 0:
        return b
    if nb == 0:
        return a
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def _block_stats(f, sampler, seed, block, size):
    vals = np.asarray(f(sampler.draw(block_rng(seed, block), size)), dtype=float)
    mean = float(np.mean(vals))
    return size, mean, float(np.sum((vals - mean) ** 2))


def mc_integrate(f, sampler, spec=None, *, workers=None):
    """Estimate the integral of ``f`` over the sampler's domain.

    Returns an :class:`IntegralResult` whose ``error_estimate`` is one
    standard error.
    """
    spec = spec or MCSpec()
    nblocks = -(-spec.sample_count // BLOCK_SIZE)
    sizes = [BLOCK_SIZE] * (nblocks - 1) + [spec.sample_count - BLOCK_SIZE * (nblocks - 1)]
    bounds = np.linspace(0, nblocks, min(spec.chunk_count, nblocks) + 1).round().astype(int)

    def run_chunk(k):
        acc = (0, 0.0, 0.0)
        for j in range(bounds[k], bounds[k + 1]):
            acc = _merge(acc, _block_stats(f, sampler, spec.seed, j, sizes[j]))
        return acc

    chunks = range(len(bounds) - 1)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, chunks))
    else:
        parts = [run_chunk(k) for k in chunks]
    acc = (0, 0.0, 0.0)
    for part in parts:
        acc = _merge(acc, part)
    n, mean, m2 = acc
    var = m2 / (n - 1) if n > 1 else 0.0
    return IntegralResult(sampler.measure * mean, sampler.measure * math.sqrt(var / n), n)


def box_sampler(lower, upper):
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)

    def draw(rng, size):
        return lower + (upper - lower) * rng.random((size, lower.size))

    return Sampler(draw, float(np.prod(upper - lower)))
