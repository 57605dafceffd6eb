"""Binary error-correcting codes with a guaranteed minimum relative distance.

Three interchangeable backends produce codewords of length ``m`` from inputs
of length ``n``:

* ``justesen`` — concatenation of an outer Reed-Solomon code over GF(2^k)
  (block length N = 2^k - 1 symbols, dimension K chosen so the overall rate
  K/(2N) approximates 1/c) with the Wozencraft-ensemble inner map sending the
  i-th symbol u to the 2k-bit pair (u, b_i * u), where b_i = x^i is the i-th
  nonzero field element.  Agreement fraction guarantee: 9/10 + 1/(15c).
* ``random_linear`` — a seeded random generator matrix, rejection-sampled
  until its exhaustively verified minimum distance meets a requested floor.
  Intended for small n, where it yields exact-delta oracle codes.
* ``repetition`` — each input bit repeated m/n times; the trivial backend.

All backends are linear over GF(2) and all encoders are pure functions of
(spec, input).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bits import BitString, hamming_distance
from .errors import CapacityError, InputSizeError, ParameterError
from .gf2k import GF2k
from .rng import Stream

BACKENDS = ("justesen", "random_linear", "repetition")

_FIELD_CACHE: dict[int, GF2k] = {}


def _field(k: int) -> GF2k:
    if k not in _FIELD_CACHE:
        _FIELD_CACHE[k] = GF2k(k)
    return _FIELD_CACHE[k]


def justesen_delta_bound(c: float) -> float:
    """Guaranteed maximum agreement fraction 9/10 + 1/(15c), valid for c > 2."""
    if c <= 2:
        raise ParameterError(f"Justesen bound requires c > 2, got {c}")
    return 9.0 / 10.0 + 1.0 / (15.0 * c)


@dataclass(frozen=True)
class CodeSpec:
    """Instantiated code: effective sizes, distance guarantee and backend data."""

    n: int
    m: int
    c: float
    delta: float
    backend: str
    # backend payloads; not part of the spec's identity
    justesen_k: int = field(default=0, compare=False, repr=False)
    justesen_dim: int = field(default=0, compare=False, repr=False)
    generator: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ParameterError(f"unknown backend {self.backend!r}")
        if self.m < self.n:
            raise ParameterError("codeword length m must be >= input length n")
        if not 0.0 <= self.delta < 1.0:
            raise ParameterError(f"delta must lie in [0, 1), got {self.delta}")


def justesen_spec(n: int, c: float) -> CodeSpec:
    """Smallest Justesen instance accepting ``n`` input bits at rate factor ~``c``.

    Inputs shorter than the returned effective ``n`` are zero-padded by
    ``encode``; the true rate factor 2N/K is reported, not the requested one.
    """
    if c <= 2:
        raise ParameterError(f"Justesen construction requires c > 2, got {c}")
    if n < 1:
        raise ParameterError("n must be >= 1")
    for k in range(2, 17):
        big_n = (1 << k) - 1
        dim = round(2 * big_n / c)
        dim = min(max(dim, 1), big_n - 1)
        if dim * k >= n:
            c_eff = 2.0 * big_n / dim
            return CodeSpec(
                n=dim * k,
                m=2 * k * big_n,
                c=c_eff,
                delta=justesen_delta_bound(c_eff),
                backend="justesen",
                justesen_k=k,
                justesen_dim=dim,
            )
    raise CapacityError(f"no Justesen instance with k <= 16 accepts n = {n}")


def repetition_spec(n: int, repeats: int) -> CodeSpec:
    if n < 1 or repeats < 1:
        raise ParameterError("n and repeats must be >= 1")
    delta = 0.0 if n == 1 else 1.0 - 1.0 / n
    return CodeSpec(n=n, m=n * repeats, c=float(repeats), delta=delta, backend="repetition")


def random_linear_spec(
    n: int, m: int, min_distance: int, seed: int, max_tries: int = 10_000
) -> CodeSpec:
    """Rejection-sample a seeded generator matrix until the exhaustive minimum
    distance reaches ``min_distance``.  Exact-delta small codes for oracle
    tests; n is capped so the 2^n weight enumeration stays trivial."""
    if n < 1 or n > 16:
        raise ParameterError("random_linear backend supports 1 <= n <= 16")
    if not 0 <= min_distance <= m:
        raise ParameterError("min_distance must lie in [0, m]")
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(max_tries):
        gen = rng.integers(0, 2, size=(n, m), dtype=np.uint8)
        dmin = _linear_min_distance(gen)
        if dmin >= min_distance:
            return CodeSpec(
                n=n,
                m=m,
                c=m / n,
                delta=1.0 - dmin / m,
                backend="random_linear",
                generator=gen,
            )
    raise CapacityError(
        f"no generator with distance >= {min_distance} found in {max_tries} tries"
    )


def _linear_min_distance(gen: np.ndarray) -> int:
    n = gen.shape[0]
    inputs = np.arange(1, 1 << n, dtype=np.uint32)
    sel = (inputs[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1
    words = (sel.astype(np.uint8) @ gen) & 1
    return int(words.sum(axis=1).min())


@dataclass(frozen=True)
class Codeword:
    bits: BitString
    source_spec: CodeSpec

    def __post_init__(self):
        if self.bits.length != self.source_spec.m:
            raise ParameterError("codeword length does not match its spec")


def _pad_input(spec: CodeSpec, x: BitString) -> np.ndarray:
    if x.length > spec.n:
        raise InputSizeError(
            f"input of {x.length} bits exceeds code input length {spec.n}"
        )
    arr = np.zeros(spec.n, dtype=np.uint8)
    arr[: x.length] = x.to_array()
    return arr


def encode(spec: CodeSpec, x: BitString) -> Codeword:
    """Encode ``x`` (zero-padded to spec.n) into an m-bit codeword."""
    arr = _pad_input(spec, x)
    if spec.backend == "repetition":
        out = np.repeat(arr, spec.m // spec.n)
    elif spec.backend == "random_linear":
        out = (arr @ spec.generator) & 1
    else:
        out = _justesen_encode(spec, arr)
    return Codeword(BitString.from_array(out.astype(np.uint8)), spec)


def _justesen_encode(spec: CodeSpec, arr: np.ndarray) -> np.ndarray:
    k, dim = spec.justesen_k, spec.justesen_dim
    gf = _field(k)
    # k-bit groups, MSB first, as field elements (polynomial basis)
    weights = 1 << np.arange(k - 1, -1, -1)
    symbols = (arr.reshape(dim, k) * weights).sum(axis=1)
    rs_vals = gf.eval_poly_at_powers(symbols)
    # Wozencraft inner map: symbol v_i -> (v_i, x^i * v_i), 2k bits MSB first
    multipliers = gf._exp[: gf.order]
    paired = gf.mul_vec(rs_vals, multipliers)
    combined = (rs_vals.astype(np.int64) << k) | paired.astype(np.int64)
    shifts = np.arange(2 * k - 1, -1, -1)
    bits = (combined[:, None] >> shifts[None, :]) & 1
    return bits.reshape(-1).astype(np.uint8)


def _encode_array(spec: CodeSpec, arr: np.ndarray) -> np.ndarray:
    return encode(spec, BitString.from_array(arr)).bits.to_array()


def verify_min_distance(
    spec: CodeSpec, max_exhaustive_n: int = 16, samples: int = 1000, seed: int = 20240
) -> tuple[float, bool]:
    """Minimum relative distance of the instantiated code.

    Exhaustive (exact) when ``spec.n <= max_exhaustive_n``, using linearity:
    the minimum pairwise distance of a linear code is its minimum nonzero
    codeword weight.  Otherwise samples random distinct input pairs and
    returns an upper estimate.
    """
    if spec.n <= max_exhaustive_n:
        if spec.backend == "random_linear":
            dmin = _linear_min_distance(spec.generator)
        else:
            dmin = spec.m
            for v in range(1, 1 << spec.n):
                arr = (v >> np.arange(spec.n)) & 1
                dmin = min(dmin, int(_encode_array(spec, arr.astype(np.uint8)).sum()))
        return dmin / spec.m, True

    stream = Stream(seed)
    best = spec.m
    for _ in range(samples):
        u = stream.take(2 * spec.n)
        a = (u[: spec.n] < 0.5).astype(np.uint8)
        b = (u[spec.n :] < 0.5).astype(np.uint8)
        if np.array_equal(a, b):
            continue
        ca = encode(spec, BitString.from_array(a))
        cb = encode(spec, BitString.from_array(b))
        best = min(best, hamming_distance(ca.bits, cb.bits))
    return best / spec.m, False
