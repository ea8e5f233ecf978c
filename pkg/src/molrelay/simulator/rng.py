"""Counter-based random number generation with per-trial substreams.

The generator is SplitMix64 run in counter mode (Steele, Lea & Flood's
SplittableRandom / Vigna's splitmix64.c): output n of the stream keyed by
``seed`` is

    u64(seed, n) = mix64((seed + (n + 1) * GOLDEN) mod 2^64)

where GOLDEN = 0x9E3779B97F4A7C15 (2^64 / golden ratio) and mix64 is the
64-bit finaliser (xor-shift-multiply, Stafford variant 13).  Because every
output is a pure function of (seed, n), any draw can be produced at random
access: trial k of a simulation owning m draws per trial reads outputs
[k*m, (k+1)*m), so partitioning trials across workers - in any order, at
any granularity - cannot change a single sampled value.

Uniforms map the top 53 bits to the open interval (0, 1) via
(bits + 0.5) * 2^-53; standard normals apply the inverse normal CDF
(scipy's ndtri).  The compiled simulator kernel re-implements exactly this
pipeline (same mixing constants, same ndtri routine), so both backends
produce bit-identical streams; tests assert it.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1
_U53_SCALE = 2.0**-53


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a Python integer (mod 2^64)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def raw_output(seed: int, index: int) -> int:
    """Output `index` (>= 0) of the stream keyed by `seed`."""
    return mix64(seed + (index + 1) * GOLDEN_GAMMA)


def derive_seed(seed: int, stream: int) -> int:
    """Spawn a child seed (used for per-row sweep substreams)."""
    return raw_output(seed, stream)


def _raw_array(seed: int, indices: np.ndarray) -> np.ndarray:
    """Vectorised raw_output over an array of draw indices."""
    z = (indices.astype(np.uint64) + np.uint64(1)) * np.uint64(GOLDEN_GAMMA)
    z += np.uint64(seed & _MASK64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def uniform_stream(seed: int, indices: np.ndarray) -> np.ndarray:
    """Open-interval (0, 1) uniforms at the given draw indices."""
    bits = _raw_array(seed, indices) >> np.uint64(11)
    return (bits.astype(np.float64) + 0.5) * _U53_SCALE


def normal_stream(seed: int, indices: np.ndarray) -> np.ndarray:
    """Standard normal draws at the given draw indices (inverse CDF)."""
    return ndtri(uniform_stream(seed, indices))


def uniform_scalar(seed: int, index: int) -> float:
    """Single open-interval uniform (reference scalar path)."""
    return ((raw_output(seed, index) >> 11) + 0.5) * _U53_SCALE


def normal_scalar(seed: int, index: int) -> float:
    """Single standard normal draw (reference scalar path)."""
    return float(ndtri(uniform_scalar(seed, index)))
