"""Deterministic counter-based random streams.

Reproducibility contract: Monte Carlo trial ``i`` of a run with master seed
``s`` draws exclusively from the substream keyed ``mix64(s, i)``, and draw
``j`` of a stream with key ``K`` is the 64-bit word ``mix64(K, j)``.  Every
draw is therefore a pure function of ``(s, i, j)``: results are random-access,
independent of scheduling, chunking and worker count.

``mix64(a, b) = fmix64(a + (b + 1) * GAMMA mod 2**64)`` where ``GAMMA`` is the
golden-ratio increment ``0x9E3779B97F4A7C15`` and ``fmix64`` is the SplitMix64
output permutation.  A single stream is thus exactly the SplitMix64 sequence
seeded at its key; the key derivation applies the same permutation once more,
which decorrelates substreams from each other and from their parent.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15

_U = np.uint64
_GAMMA = _U(GAMMA)
_M1 = _U(0xBF58476D1CE4E5B9)
_M2 = _U(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = _U(30), _U(27), _U(31), _U(11)
_ONE = _U(1)
# 2**-53; (word >> 11) * 2**-53 yields a uniform double in [0, 1)
_INV53 = 1.0 / (1 << 53)


def _fmix64(x: int) -> int:
    x &= MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


def mix64(a: int, b: int) -> int:
    """Mix two 64-bit words into one; the substream/draw derivation function."""
    return _fmix64((a + (b + 1) * GAMMA) & MASK64)


def _fmix64_array(x: np.ndarray) -> np.ndarray:
    # modular wraparound is the intent; silence 0-d overflow warnings
    with np.errstate(over="ignore"):
        x = x.astype(np.uint64, copy=True)
        x ^= x >> _S30
        x *= _M1
        x ^= x >> _S27
        x *= _M2
        x ^= x >> _S31
    return x


def mix64_array(a, b) -> np.ndarray:
    """Vectorized ``mix64``; ``a`` and ``b`` broadcast as uint64 arrays."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    with np.errstate(over="ignore"):
        seeded = a + (b + _ONE) * _GAMMA
    return _fmix64_array(seeded)


def words_to_uniform(words: np.ndarray) -> np.ndarray:
    """Map 64-bit words to doubles in [0, 1) using the top 53 bits."""
    return (words >> _S11).astype(np.float64) * _INV53


class Stream:
    """Random-access uniform stream over a 64-bit key.

    ``block(start, n)`` returns draws ``start .. start+n-1`` without touching
    the cursor; ``take(n)`` returns the next ``n`` draws sequentially.
    """

    def __init__(self, key: int):
        self.key = key & MASK64
        self._cursor = 0

    @classmethod
    def for_trial(cls, master_seed: int, trial: int) -> "Stream":
        return cls(mix64(master_seed, trial))

    def block(self, start: int, n: int) -> np.ndarray:
        idx = np.arange(start, start + n, dtype=np.uint64)
        return words_to_uniform(mix64_array(_U(self.key), idx))

    def take(self, n: int) -> np.ndarray:
        out = self.block(self._cursor, n)
        self._cursor += n
        return out

    def uniform(self) -> float:
        return float(self.take(1)[0])


def trial_uniform_block(master_seed: int, trials: np.ndarray, n_draws: int) -> np.ndarray:
    """Uniform draws ``0 .. n_draws-1`` for each trial index in ``trials``.

    Returns shape ``(len(trials), n_draws)``; row ``t`` equals
    ``Stream.for_trial(master_seed, trials[t]).block(0, n_draws)``.
    """
    keys = mix64_array(_U(master_seed & MASK64), np.asarray(trials, dtype=np.uint64))
    idx = np.arange(n_draws, dtype=np.uint64)
    with np.errstate(over="ignore"):
        seeded = keys[:, None] + (idx[None, :] + _ONE) * _GAMMA
    return words_to_uniform(_fmix64_array(seeded))
