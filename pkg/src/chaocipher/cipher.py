"""Encryption and decryption pipelines.

Encryption: sum the gray values of the plain image, derive Arnold
parameters from that sum, scramble, flatten, and XOR with both keystreams
in CBC fashion::

    C(i) = S(i) ^ K1(i) ^ K2(i) ^ C(i-1),   i = 1 .. M*N*3,  C(0) = c0

Decryption runs the chain backwards to recover the scrambled image ``S``.
Scrambling only moves values around, so ``gray_value_sum(S)`` equals the
plain image's sum. That lets decryption re-derive the Arnold parameters
without any side channel, and the ciphertext stays a bare image.

Storage is 0-based: ``seq[k]`` holds ``S(k+1)``, and the seed ``c0`` sits
in front of the chain when computing ``C(i-1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import arnold
from .hyperchaos import ChaosParams, TrajectoryDivergedError, generate_keystreams
from .imagecore import ColorImage, delinearize, gray_value_sum, linearize

KEY_FIELDS = ChaosParams.FIELDS + ("c0",)
WEAK_KEY_PROBE = 4096


@dataclass(frozen=True)
class CipherKey:
    chaos: ChaosParams
    c0: int

    def __post_init__(self) -> None:
        if isinstance(self.c0, bool) or not isinstance(self.c0, (int, np.integer)):
            raise TypeError(f"c0 must be an integer, got {self.c0!r}")
        if not 0 <= self.c0 <= 255:
            raise ValueError(f"c0 must lie in [0, 255], got {self.c0}")
        object.__setattr__(self, "c0", int(self.c0))

    def perturbed(self, component: str, delta) -> CipherKey:
        """Copy with one field shifted; ``c0`` wraps modulo 256."""
        if component == "c0":
            return replace(self, c0=(self.c0 + int(delta)) % 256)
        return replace(self, chaos=self.chaos.perturbed(component, delta))


def _as_bytes(seq, name: str) -> np.ndarray:
    arr = np.asarray(seq)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError(f"{name} values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def _check_lengths(s, k1, k2) -> None:
    if not (s.size == k1.size == k2.size):
        raise ValueError(f"length mismatch: data {s.size}, k1 {k1.size}, k2 {k2.size}")


def cbc_chain(s, k1, k2, c0: int) -> np.ndarray:
    s, k1, k2 = _as_bytes(s, "s"), _as_bytes(k1, "k1"), _as_bytes(k2, "k2")
    _check_lengths(s, k1, k2)
    # C(i) = c0 ^ X(1) ^ ... ^ X(i) with X = S ^ K1 ^ K2
    mixed = s ^ k1 ^ k2
    mixed[:1] ^= np.uint8(c0)
    return np.bitwise_xor.accumulate(mixed)


def cbc_unchain(c, k1, k2, c0: int) -> np.ndarray:
    c, k1, k2 = _as_bytes(c, "c"), _as_bytes(k1, "k1"), _as_bytes(k2, "k2")
    _check_lengths(c, k1, k2)
    prev = np.empty_like(c)
    prev[:1] = c0
    prev[1:] = c[:-1]
    return c ^ k1 ^ k2 ^ prev


def encrypt(plain: ColorImage, key: CipherKey) -> ColorImage:
    """Raises NonSquareImageError or TrajectoryDivergedError."""
    if not plain.is_square:
        raise arnold.NonSquareImageError(f"need a square image, got {plain.height}x{plain.width}")
    params = arnold.derive_params(gray_value_sum(plain))
    scrambled = arnold.scramble(plain, params)
    length = plain.height * plain.width * 3
    k1, k2 = generate_keystreams(key.chaos, length)
    chained = cbc_chain(linearize(scrambled), k1, k2, key.c0)
    return delinearize(chained, plain.height, plain.width)


def decrypt(cipher: ColorImage, key: CipherKey) -> ColorImage:
    if not cipher.is_square:
        raise arnold.NonSquareImageError(f"need a square image, got {cipher.height}x{cipher.width}")
    length = cipher.height * cipher.width * 3
    k1, k2 = generate_keystreams(key.chaos, length)
    seq = cbc_unchain(linearize(cipher), k1, k2, key.c0)
    scrambled = delinearize(seq, cipher.height, cipher.width)
    params = arnold.derive_params(gray_value_sum(scrambled))
    return arnold.unscramble(scrambled, params)


def weak_key_reason(key: CipherKey, probe: int = WEAK_KEY_PROBE) -> str | None:
    """Describe why a key is unfit for use, or return None.

    A key is weak when a short prefix of its combined keystream collapses
    to a handful of byte values (fixed points, short cycles, the all-zero
    stream from the origin). Divergence propagates as an exception.
    """
    k1, k2 = generate_keystreams(key.chaos, probe)
    combined = k1 ^ k2
    distinct = np.unique(combined).size
    if distinct < 64:
        return f"keystream prefix of {probe} bytes has only {distinct} distinct values"
    tail = combined[probe // 2:]
    for period in range(1, 257):
        if np.array_equal(tail[period:], tail[:-period]):
            return f"keystream is periodic with period {period}"
    return None


__all__ = [
    "CipherKey",
    "KEY_FIELDS",
    "TrajectoryDivergedError",
    "cbc_chain",
    "cbc_unchain",
    "decrypt",
    "encrypt",
    "weak_key_reason",
]
