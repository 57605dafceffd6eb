"""Classical fingerprinting reference.

Two distinct objects: the published cost model (2 sqrt(n) + const bits per
round, repeated until the target error is met) used for the cost-curve
comparison, and a concrete simulatable SMP equality protocol for desk-scale
runs: the codeword is arranged as a sqrt(M) x sqrt(M) grid, Alice sends a
random row, Bob a random column, and the referee compares the intersection
bit.  The grid protocol never errs on equal inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bits import BitString
from .codes import CodeSpec, encode
from .errors import DimensionError, ParameterError
from .rng import Stream


@dataclass(frozen=True)
class ClassicalCostModel:
    """Per-round cost 2 sqrt(n) + const with a fixed per-round error.

    The defaults (const 0, per-round error 1/4) give ten repetitions at the
    1e-6 target; the per-round error is back-solved from that repetition
    count, it is a modeling choice rather than a published figure.
    """

    const: float = 0.0
    per_round_error: float = 0.25

    def __post_init__(self):
        if not 0 < self.per_round_error < 1:
            raise ParameterError("per_round_error must lie in (0, 1)")

    def repetitions(self, target_error: float) -> int:
        if not 0 < target_error < 1:
            raise ParameterError("target_error must lie in (0, 1)")
        return math.ceil(math.log(target_error) / math.log(self.per_round_error))

    def per_round_bits(self, n: int) -> float:
        return 2.0 * math.sqrt(n) + self.const


def classical_cost(
    n: int, target_error: float, model: ClassicalCostModel | None = None
) -> float:
    """Total classical fingerprinting cost in bits at the target error."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    model = model or ClassicalCostModel()
    return model.repetitions(target_error) * model.per_round_bits(n)


def grid_side(m: int) -> int:
    """Side of the smallest square grid holding an m-bit codeword."""
    return math.isqrt(m - 1) + 1 if m > 1 else 1


def grid_round_bits(m: int) -> int:
    """Per-round communication: a row plus a column plus their indices."""
    side = grid_side(m)
    index_bits = math.ceil(math.log2(side)) if side > 1 else 0
    return 2 * (side + index_bits)


def _padded_grid(spec: CodeSpec, x: BitString) -> np.ndarray:
    side = grid_side(spec.m)
    flat = np.zeros(side * side, dtype=np.uint8)
    flat[: spec.m] = encode(spec, x).bits.to_array()
    return flat.reshape(side, side)


def grid_protocol_trial(
    spec: CodeSpec, x: BitString, x_prime: BitString, rounds: int, rng: Stream
) -> str:
    """One run of the classical grid protocol; returns "equal" or "different".

    Each round consumes two uniforms (Alice's row, Bob's column).
    """
    if rounds < 1:
        raise ParameterError("rounds must be >= 1")
    if x.length > spec.n or x_prime.length > spec.n:
        raise DimensionError("inputs longer than the code's input length")
    ga = _padded_grid(spec, x)
    gb = _padded_grid(spec, x_prime)
    side = ga.shape[0]
    u = rng.take(2 * rounds)
    rows = np.minimum((u[0::2] * side).astype(np.int64), side - 1)
    cols = np.minimum((u[1::2] * side).astype(np.int64), side - 1)
    mismatch = ga[rows, cols] != gb[rows, cols]
    return "different" if mismatch.any() else "equal"


def grid_mismatch_probability(spec: CodeSpec, x: BitString, x_prime: BitString) -> float:
    """Exact single-round mismatch probability: differing cells / grid area."""
    ga = _padded_grid(spec, x)
    gb = _padded_grid(spec, x_prime)
    return float((ga != gb).mean())


def grid_rounds_for_target(target_error: float, per_round_mismatch: float) -> int:
    """Rounds needed so (1 - per_round_mismatch)^rounds <= target_error."""
    if not 0 < target_error < 1:
        raise ParameterError("target_error must lie in (0, 1)")
    if not 0 < per_round_mismatch <= 1:
        raise ParameterError("per_round_mismatch must lie in (0, 1]")
    if per_round_mismatch == 1.0:
        return 1
    return math.ceil(math.log(target_error) / math.log(1.0 - per_round_mismatch))
