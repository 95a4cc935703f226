"""Seeded random streams and the Gamma/Beta samplers used by the agents.

Uniform variates come from numpy's PCG64 bit generator (64-bit seeded,
platform independent bitstream). Each uniform is a 53-bit double
``(next_uint64 >> 11) * 2**-53`` in [0, 1). Every other distribution here
is built from those uniforms by code in this module, so a seed pins the
whole sequence of draws regardless of numpy's own samplers.

Gamma variates use the Marsaglia-Tsang squeeze/rejection method for shapes
>= 1; smaller shapes are boosted to ``shape + 1`` and multiplied by
``U ** (1 / shape)``. The samplers work in log space so that extreme shapes
neither overflow nor underflow before the Beta ratio is formed.
"""

from __future__ import annotations

import math
import sys

import numpy as np

_BLOCK = 4096
_TINY = sys.float_info.min
_BETA_HI = math.nextafter(1.0, 0.0)
_GAMMA_MAX = sys.float_info.max


def derive(seed: int, run_index: int) -> int:
    """Derive a well-separated 64-bit seed for run ``run_index``.

    Uses numpy's SeedSequence hashing, so neighbouring run indices give
    unrelated streams.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(run_index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _check_shape(shape) -> float:
    shape = float(shape)
    if not math.isfinite(shape) or shape <= 0.0:
        raise ValueError(f"shape must be finite and positive, got {shape!r}")
    return shape


class RandomStream:
    """Single-owner deterministic stream of random variates.

    Parameters
    ----------
    seed : int
        64-bit unsigned seed. Two streams with the same seed produce the same
        draws for the same sequence of calls.
    """

    def __init__(self, seed: int) -> None:
        self.seed = _check_seed(seed)
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))
        self._buf: list[float] = []
        self._pos = 0
        self._spare_normal: float | None = None

    @classmethod
    def derived(cls, seed: int, run_index: int) -> "RandomStream":
        return cls(derive(seed, run_index))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed})"

    def uniform(self) -> float:
        pos = self._pos
        if pos == len(self._buf):
            self._buf = self._gen.random(_BLOCK).tolist()
            pos = 0
        self._pos = pos + 1
        return self._buf[pos]

    def normal(self) -> float:
        # Marsaglia polar method; the second variate of each pair is kept.
        spare = self._spare_normal
        if spare is not None:
            self._spare_normal = None
            return spare
        uniform = self.uniform
        while True:
            x = 2.0 * uniform() - 1.0
            y = 2.0 * uniform() - 1.0
            s = x * x + y * y
            if 0.0 < s < 1.0:
                break
        m = math.sqrt(-2.0 * math.log(s) / s)
        self._spare_normal = y * m
        return x * m

    def _log_gamma_mt(self, shape: float) -> float:
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            x = self.normal()
            v = 1.0 + c * x
            if v <= 0.0:
                continue
            v = v * v * v
            u = 1.0 - self.uniform()  # (0, 1]
            x2 = x * x
            if u < 1.0 - 0.0331 * x2 * x2:
                return math.log(d) + math.log(v)
            if math.log(u) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
                return math.log(d) + math.log(v)

    def log_gamma(self, shape: float) -> float:
        """Natural log of a Gamma(shape, 1) variate."""
        if shape >= 1.0:
            return self._log_gamma_mt(shape)
        log_x = self._log_gamma_mt(shape + 1.0)
        u = 1.0 - self.uniform()
        return log_x + math.log(u) / shape

    def gamma(self, shape: float) -> float:
        shape = _check_shape(shape)
        log_x = self.log_gamma(shape)
        if log_x > 709.0:
            return _GAMMA_MAX if log_x > 709.78 else math.exp(log_x)
        return max(math.exp(log_x), _TINY)

    def beta(self, a: float, b: float) -> float:
        """Beta(a, b) variate as X / (X + Y), X ~ Gamma(a), Y ~ Gamma(b).

        X is drawn before Y. The result is strictly inside (0, 1).
        """
        a = _check_shape(a)
        b = _check_shape(b)
        log_x = self.log_gamma(a)
        log_y = self.log_gamma(b)
        diff = log_y - log_x
        if diff > 700.0:
            value = math.exp(-diff)
        else:
            value = 1.0 / (1.0 + math.exp(diff))
        if value < _TINY:
            return _TINY
        if value > _BETA_HI:
            return _BETA_HI
        return value


def uniform01(rng: RandomStream) -> float:
    return rng.uniform()


def gamma_sample(rng: RandomStream, shape: float) -> float:
    return rng.gamma(shape)


def beta_sample(rng: RandomStream, a: float, b: float) -> float:
    return rng.beta(a, b)
