"""Packed bit strings and their on-disk format.

Bits are packed MSB-first within each byte; pad bits in the final byte are
zero.  The file layout is normative for cross-implementation exchange:
4-byte magic ``QFP1``, 8-byte little-endian bit count, then payload bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FormatError, ParameterError

MAGIC = b"QFP1"
HEADER_LEN = 12


@dataclass(frozen=True)
class BitString:
    """Immutable bit sequence of known length."""

    length: int
    payload: bytes

    def __post_init__(self):
        if self.length < 1:
            raise ParameterError(f"bit length must be >= 1, got {self.length}")
        expected = (self.length + 7) // 8
        if len(self.payload) != expected:
            raise DimensionError(
                f"payload holds {len(self.payload)} bytes, need {expected} for {self.length} bits"
            )
        pad = 8 * expected - self.length
        if pad and (self.payload[-1] & ((1 << pad) - 1)):
            raise ParameterError("trailing pad bits must be zero")

    @classmethod
    def from_array(cls, bits: np.ndarray) -> "BitString":
        """Build from a 1-D array of 0/1 values."""
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise DimensionError("bit array must be 1-D")
        return cls(int(arr.size), np.packbits(arr).tobytes())

    @classmethod
    def from_bits(cls, bits) -> "BitString":
        return cls.from_array(np.fromiter(bits, dtype=np.uint8))

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        return cls.from_array(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def zeros(cls, length: int) -> "BitString":
        return cls(length, bytes((length + 7) // 8))

    def to_array(self) -> np.ndarray:
        raw = np.frombuffer(self.payload, dtype=np.uint8)
        return np.unpackbits(raw)[: self.length]

    def __str__(self) -> str:
        return "".join("01"[b] for b in self.to_array())

    def __xor__(self, other: "BitString") -> "BitString":
        if self.length != other.length:
            raise DimensionError("XOR requires equal lengths")
        a = np.frombuffer(self.payload, dtype=np.uint8)
        b = np.frombuffer(other.payload, dtype=np.uint8)
        return BitString(self.length, (a ^ b).tobytes())

    def serialize(self) -> bytes:
        return MAGIC + struct.pack("<Q", self.length) + self.payload

    @classmethod
    def deserialize(cls, blob: bytes) -> "BitString":
        if len(blob) < 4 or blob[:4] != MAGIC:
            raise FormatError(f"bad magic, expected {MAGIC!r}", 0)
        if len(blob) < HEADER_LEN:
            raise FormatError("truncated header", len(blob))
        (length,) = struct.unpack("<Q", blob[4:HEADER_LEN])
        if length < 1:
            raise FormatError("bit length field must be >= 1", 4)
        n_bytes = (length + 7) // 8
        if len(blob) < HEADER_LEN + n_bytes:
            raise FormatError(
                f"payload truncated, need {n_bytes} bytes", len(blob)
            )
        if len(blob) > HEADER_LEN + n_bytes:
            raise FormatError("trailing bytes after payload", HEADER_LEN + n_bytes)
        payload = blob[HEADER_LEN:]
        pad = 8 * n_bytes - length
        if pad and (payload[-1] & ((1 << pad) - 1)):
            raise FormatError("nonzero pad bits in final byte", len(blob) - 1)
        return cls(length, payload)


def read_bitstring(path) -> BitString:
    with open(path, "rb") as fh:
        return BitString.deserialize(fh.read())


def write_bitstring(path, bits: BitString) -> None:
    with open(path, "wb") as fh:
        fh.write(bits.serialize())


def hamming_distance(a: BitString, b: BitString) -> int:
    """Number of positions where two equal-length bit strings differ."""
    if a.length != b.length:
        raise DimensionError(f"length mismatch: {a.length} != {b.length}")
    xa = np.frombuffer(a.payload, dtype=np.uint8)
    xb = np.frombuffer(b.payload, dtype=np.uint8)
    return int(np.bitwise_count(xa ^ xb).sum())
