"""Counter-based deterministic random streams.

Every random draw in the package is a pure function of
(master_seed, layer_index, sample_index, draw_index) through a splitmix64
hash, so parallel sampling is order-independent and replays bit-exactly.
"""
from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = float(2.0 ** -53)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def uniforms(master_seed: int, layer: int, samples, draw: int) -> np.ndarray:
    """Uniform [0,1) draws for an array of sample indices, vectorized."""
    samples = np.asarray(samples, dtype=np.uint64)
    h = _splitmix64(np.uint64(master_seed % (1 << 64)))
    h = _splitmix64(h ^ np.uint64(layer))
    h = _splitmix64(h ^ samples)
    h = _splitmix64(h ^ np.uint64(draw))
    return (h >> np.uint64(11)).astype(np.float64) * _INV_2_53


class SampleStream:
    """Sequential uniform stream for one (seed, layer, sample) triple."""

    def __init__(self, master_seed: int, layer: int = 0, sample: int = 0):
        self.master_seed = int(master_seed)
        self.layer = int(layer)
        self.sample = int(sample)
        self._draw = 0

    def next_uniform(self) -> float:
        u = uniforms(self.master_seed, self.layer, [self.sample], self._draw)[0]
        self._draw += 1
        return float(u)
