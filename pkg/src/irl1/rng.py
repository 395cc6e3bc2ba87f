"""Deterministic counter-based random number generation.

All stochastic inputs (sensing matrices, spike placement, noise, probe
vectors) are drawn from SplitMix64, a counter-based 64-bit generator: output
``k`` is a bijective finalizer applied to ``seed + (k+1) * GOLDEN`` modulo
2**64.  Because each output depends only on the seed and the draw index, the
stream can be produced in vectorized batches while remaining identical to a
one-draw-at-a-time implementation.

Conventions fixed here (and relied on for reproducibility):

* uniform doubles take the top 53 bits: ``(u >> 11) * 2**-53`` in ``[0, 1)``;
* standard normals come from Marsaglia's polar rejection on consecutive
  uniform pairs; each call to :meth:`SplitMix64.normals` starts a fresh pair
  and discards the unused half-sample of the final accepted pair when the
  requested count is odd;
* bounded integers use the multiply-shift reduction ``(u * bound) >> 64``
  (bias below ``bound / 2**64``, irrelevant at the bounds used here);
* random signs take the top bit of one raw draw (0 -> +1, 1 -> -1).
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1

_U64_TO_UNIT = 2.0**-53


def _finalize(z: np.ndarray) -> np.ndarray:
    """SplitMix64 output mixer on an array of uint64 states."""
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Counter-based SplitMix64 stream with Gaussian and integer helpers."""

    def __init__(self, seed: int):
        self._seed = seed & _MASK64
        self._counter = 0

    @property
    def draws_consumed(self) -> int:
        return self._counter

    def _outputs(self, start: int, count: int) -> np.ndarray:
        idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
        states = np.uint64(self._seed) + np.uint64(GOLDEN) * idx
        return _finalize(states)

    def raw(self, count: int) -> np.ndarray:
        """Next `count` raw 64-bit outputs."""
        out = self._outputs(self._counter, count)
        self._counter += count
        return out

    def uniforms(self, count: int) -> np.ndarray:
        """Next `count` doubles, uniform on [0, 1)."""
        return (self.raw(count) >> np.uint64(11)).astype(np.float64) * _U64_TO_UNIT

    def normals(self, count: int) -> np.ndarray:
        """Next `count` standard normals via polar rejection on uniform pairs."""
        out = np.empty(count, dtype=np.float64)
        filled = 0
        while filled < count:
            # ~0.785 acceptance rate; oversample so one pass usually suffices.
            npairs = max(64, int((count - filled) * 0.7) + 16)
            block = self._outputs(self._counter, 2 * npairs)
            u = (block >> np.uint64(11)).astype(np.float64) * _U64_TO_UNIT
            v = 2.0 * u - 1.0
            v1, v2 = v[0::2], v[1::2]
            s = v1 * v1 + v2 * v2
            acc = np.nonzero((s > 0.0) & (s < 1.0))[0]
            f = np.sqrt(-2.0 * np.log(s[acc]) / s[acc])
            z = np.empty(2 * acc.size, dtype=np.float64)
            z[0::2] = v1[acc] * f
            z[1::2] = v2[acc] * f
            need = count - filled
            if z.size >= need:
                pairs_used = (need + 1) // 2
                # advance past the last pair actually inspected
                self._counter += 2 * (int(acc[pairs_used - 1]) + 1)
                out[filled:] = z[:need]
                filled = count
            else:
                self._counter += 2 * npairs
                out[filled : filled + z.size] = z
                filled += z.size
        return out

    def below(self, bound: int) -> int:
        """One integer uniform on {0, ..., bound-1} by multiply-shift."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        u = int(self.raw(1)[0])
        return (u * bound) >> 64

    def sign(self) -> int:
        """One uniform sign in {-1, +1} from the top bit of a raw draw."""
        return 1 if (int(self.raw(1)[0]) >> 63) == 0 else -1
