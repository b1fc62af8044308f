"""
Explicit, splittable random streams and the low-level variate kernels.

An ``RngState`` is a value: the same state always yields the same words.
Kernels build a Philox generator from the state, so callers that need
several independent draws must ``split`` first.
"""
import dataclasses
from typing import Tuple

import numpy as np
from scipy.special import gammaln

from .exceptions import InvalidParameter
from .numcore import F32, F64, I64, as_ndvalue, as_shape, prod

_MASK64 = (1 << 64) - 1


def splitmix64(value: int) -> int:
    """One round of the splitmix64 finalizer over a 64-bit word."""
    value = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = value
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclasses.dataclass(frozen=True)
class RngState:
    """128-bit Philox key plus a stream position."""
    key: int
    counter: int = 0

    @classmethod
    def from_seed(cls, seed: int) -> 'RngState':
        """Expand a u64 seed: key = splitmix64(seed) << 64 | splitmix64(splitmix64(seed))."""
        seed = int(seed)
        if not 0 <= seed <= _MASK64:
            raise ValueError(f'Seed must be an unsigned 64-bit integer, got {seed}')
        hi = splitmix64(seed)
        lo = splitmix64(hi)
        return cls(key=(hi << 64) | lo, counter=0)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.key, counter=self.counter))

    def split(self, n: int = 2) -> Tuple['RngState', ...]:
        """Derive ``n`` independent child states with fresh keys."""
        words = self.generator().bit_generator.random_raw(2 * n)
        return tuple(
            RngState(key=(int(words[2 * i]) << 64) | int(words[2 * i + 1]), counter=0)
            for i in range(n)
        )


class _Stream:
    """Sequential reader over one state's words, used by rejection loops."""

    def __init__(self, rng: RngState):
        self._bits = rng.generator().bit_generator

    def words(self, n: int) -> np.ndarray:
        return np.asarray(self._bits.random_raw(n), dtype=np.uint64)

    def uniform(self, n: int, dtype=F64) -> np.ndarray:
        return _words_to_open_unit(self.words(n), dtype)

    def normal(self, n: int, dtype=F64) -> np.ndarray:
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs, dtype)
        return box_muller(u[0::2], u[1::2]).reshape(-1)[:n]


def _words_to_open_unit(words: np.ndarray, dtype) -> np.ndarray:
    dtype = np.dtype(dtype)
    # 53 high bits centered in their cell: strictly inside (0, 1)
    u = ((words >> np.uint64(11)).astype(F64) + 0.5) * (2.0 ** -53)
    u = u.astype(dtype)
    lo = np.finfo(dtype).eps * 0.5
    hi = np.nextafter(dtype.type(1), dtype.type(0))
    return np.clip(u, lo, hi)


def _check_float(dtype):
    dtype = np.dtype(dtype)
    if dtype not in (F32, F64):
        raise TypeError(f'Expected a floating dtype, got {dtype}')
    return dtype


def uniform(rng: RngState, shape=(), dtype=F64) -> np.ndarray:
    """I.i.d. draws in the open interval (0, 1)."""
    dtype = _check_float(dtype)
    shape = as_shape(shape)
    return _Stream(rng).uniform(prod(shape), dtype).reshape(shape)


def box_muller(u1, u2) -> np.ndarray:
    """Pairs (z0, z1) = sqrt(-2 ln u1) (cos 2 pi u2, sin 2 pi u2), stacked on the last axis."""
    u1 = np.asarray(u1)
    u2 = np.asarray(u2)
    radius = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    return np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=-1).astype(u1.dtype)


def standard_normal(rng: RngState, shape=(), dtype=F64) -> np.ndarray:
    """Box-Muller normals; an odd count discards the last partner."""
    dtype = _check_float(dtype)
    shape = as_shape(shape)
    return _Stream(rng).normal(prod(shape), dtype).reshape(shape)


def standard_gamma(rng: RngState, concentration, shape=None, dtype=None,
                   validate_args: bool = False) -> np.ndarray:
    """
    Marsaglia-Tsang rejection sampler for Gamma(concentration, 1).

    ``shape`` must be broadcast-compatible with ``concentration``; it
    defaults to the concentration's shape. Concentrations below one draw
    with concentration + 1 and are boosted by u ** (1 / concentration).
    """
    alpha = as_ndvalue(concentration, dtype or None)
    if alpha.dtype.kind != 'f':
        alpha = alpha.astype(F64)
    dtype = alpha.dtype
    if validate_args and np.any(~(alpha > 0)):
        raise InvalidParameter('concentration must be positive')
    shape = alpha.shape if shape is None else as_shape(shape)
    alpha = np.broadcast_to(alpha, shape).reshape(-1).astype(F64)
    n = alpha.size

    boost = alpha < 1
    a = np.where(boost, alpha + 1.0, alpha)
    d = a - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)

    stream = _Stream(rng)
    out = np.full(n, np.nan)
    pending = np.flatnonzero(alpha > 0)
    with np.errstate(invalid='ignore', divide='ignore'):
        while pending.size:
            x = stream.normal(pending.size)
            u = stream.uniform(pending.size)
            v = (1.0 + c[pending] * x) ** 3
            dp = d[pending]
            log_v = np.log(np.where(v > 0, v, 1.0))
            accept = (v > 0) & (np.log(u) < 0.5 * x * x + dp - dp * v + dp * log_v)
            out[pending[accept]] = dp[accept] * v[accept]
            pending = pending[~accept]
        if np.any(boost):
            u = stream.uniform(n)
            out[boost] *= u[boost] ** (1.0 / alpha[boost])
    return out.reshape(shape).astype(dtype)


def _knuth_poisson(stream: _Stream, rate: np.ndarray) -> np.ndarray:
    limit = np.exp(-rate)
    count = np.zeros(rate.size, dtype=I64)
    product = np.ones(rate.size)
    pending = np.arange(rate.size)
    while pending.size:
        product[pending] *= stream.uniform(pending.size)
        still = product[pending] > limit[pending]
        count[pending[still]] += 1
        pending = pending[still]
    return count


def _ptrs_poisson(stream: _Stream, rate: np.ndarray) -> np.ndarray:
    # Hormann's transformed rejection with squeeze, valid for rate >= 10.
    slam = np.sqrt(rate)
    loglam = np.log(rate)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2)

    out = np.zeros(rate.size, dtype=I64)
    pending = np.arange(rate.size)
    with np.errstate(invalid='ignore', divide='ignore'):
        while pending.size:
            u = stream.uniform(pending.size) - 0.5
            v = stream.uniform(pending.size)
            us = 0.5 - np.abs(u)
            ap, bp, lam = a[pending], b[pending], rate[pending]
            k = np.floor((2 * ap / us + bp) * u + lam + 0.43)
            quick = (us >= 0.07) & (v <= vr[pending])
            reject = (k < 0) | ((us < 0.013) & (v > us))
            log_lhs = np.log(v) + np.log(invalpha[pending]) - np.log(ap / (us * us) + bp)
            log_rhs = -lam + k * loglam[pending] - gammaln(k + 1)
            accept = quick | (~reject & (log_lhs <= log_rhs))
            out[pending[accept]] = k[accept].astype(I64)
            pending = pending[~accept]
    return out


def standard_poisson(rng: RngState, rate, shape=None, validate_args: bool = False) -> np.ndarray:
    """Poisson draws: Knuth's product of uniforms for rate <= 10, PTRS above."""
    rate = as_ndvalue(rate)
    if rate.dtype.kind != 'f':
        rate = rate.astype(F64)
    if validate_args and np.any(~(rate > 0)):
        raise InvalidParameter('rate must be positive')
    shape = rate.shape if shape is None else as_shape(shape)
    flat = np.broadcast_to(rate, shape).reshape(-1).astype(F64)

    small_rng, large_rng = rng.split(2)
    out = np.zeros(flat.size, dtype=I64)
    small = flat <= 10
    large = ~small & (flat > 0)
    if np.any(small):
        out[small] = _knuth_poisson(_Stream(small_rng), flat[small])
    if np.any(large):
        out[large] = _ptrs_poisson(_Stream(large_rng), flat[large])
    return out.reshape(shape)
