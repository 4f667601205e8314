"""3D Arnold cat map over pixel positions, including across color planes.

One application sends position ``(x, y, z)`` of an ``M x M x 3`` image to::

    x' = (x + a*y) mod M
    y' = (b*x + (a*b + 1)*y) mod M
    z' = (c*x + d*y + z) mod 3

The 2x2 spatial block has determinant 1 and the channel row is unit-lower
triangular, so on a square grid the map is a bijection. Iterating ``n``
times scrambles the image; the same number of inverse steps restores it.

Each pass moves every pixel simultaneously (the map acts on positions, and
the whole array is rebuilt from the previous one), never in place.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .imagecore import ColorImage

DEFAULT_PERIOD_CAP = 10**6


class NonSquareImageError(ValueError):
    """The Arnold map is only a permutation when M == N."""


@dataclass(frozen=True)
class ArnoldParams:
    a: int
    b: int
    c: int
    d: int
    n: int

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d", "n"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise TypeError(f"{name} must be an integer, got {v!r}")
            if v < 0:
                raise ValueError(f"{name} must be non-negative, got {v}")

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.a, self.b, self.c, self.d, self.n)


def derive_params(gv_sum: int) -> ArnoldParams:
    """Map the plain-image gray-value sum to the scramble parameters."""
    if gv_sum < 0:
        raise ValueError("gray-value sum must be non-negative")
    return ArnoldParams(
        a=13 + gv_sum % 97,
        b=23 + gv_sum % 59,
        c=17 + gv_sum % 79,
        d=37 + gv_sum % 43,
        n=7 + gv_sum % 31,
    )


def _require_square(m: int, n: int) -> None:
    if m != n:
        raise NonSquareImageError(f"Arnold scrambling needs a square image, got {m}x{n}")


def map_point(p: tuple[int, int, int], params: ArnoldParams, m: int, n: int) -> tuple[int, int, int]:
    """One forward application to a single position."""
    _require_square(m, n)
    x, y, z = p
    if not (0 <= x < m and 0 <= y < n and 0 <= z < 3):
        raise ValueError(f"position {p} outside a {m}x{n}x3 grid")
    a, b, c, d = params.a, params.b, params.c, params.d
    return ((x + a * y) % m, (b * x + (a * b + 1) * y) % n, (c * x + d * y + z) % 3)


def inverse_map_point(p: tuple[int, int, int], params: ArnoldParams, m: int, n: int) -> tuple[int, int, int]:
    """Undo one application of :func:`map_point`."""
    _require_square(m, n)
    xp, yp, zp = p
    if not (0 <= xp < m and 0 <= yp < n and 0 <= zp < 3):
        raise ValueError(f"position {p} outside a {m}x{n}x3 grid")
    a, b, c, d = params.a, params.b, params.c, params.d
    x = ((a * b + 1) * xp - a * yp) % m
    y = (-b * xp + yp) % n
    z = (zp - c * x - d * y) % 3
    return (x, y, z)


@lru_cache(maxsize=64)
def _destinations(a: int, b: int, c: int, d: int, m: int) -> np.ndarray:
    # dest[i] = linear index that position i moves to after one pass
    x, y, z = np.meshgrid(np.arange(m, dtype=np.int64), np.arange(m, dtype=np.int64),
                          np.arange(3, dtype=np.int64), indexing="ij")
    # reduce coefficients first so products stay far from int64 overflow
    a_m, b_m, ab1_m = a % m, b % m, (a * b + 1) % m
    xn = (x + a_m * y) % m
    yn = (b_m * x + ab1_m * y) % m
    zn = ((c % 3) * x + (d % 3) * y + z) % 3
    dest = ((xn * m + yn) * 3 + zn).ravel()
    dest.setflags(write=False)
    return dest


def permutation_table(params: ArnoldParams, m: int) -> np.ndarray:
    """Destination index of every linear position under one forward pass."""
    return _destinations(params.a, params.b, params.c, params.d, m)


def scramble(img: ColorImage, params: ArnoldParams) -> ColorImage:
    _require_square(img.height, img.width)
    m = img.height
    dest = permutation_table(params, m)
    cur = img.pixels.reshape(-1)
    for _ in range(params.n):
        nxt = np.empty_like(cur)
        nxt[dest] = cur
        cur = nxt
    return ColorImage(cur.reshape(m, m, 3))


def unscramble(img: ColorImage, params: ArnoldParams) -> ColorImage:
    _require_square(img.height, img.width)
    m = img.height
    dest = permutation_table(params, m)
    cur = img.pixels.reshape(-1)
    for _ in range(params.n):
        cur = cur[dest]
    return ColorImage(cur.reshape(m, m, 3))


def period_of(params: ArnoldParams, m: int, cap: int = DEFAULT_PERIOD_CAP) -> int:
    """Smallest t >= 1 with t forward passes equal to the identity.

    Computed as the lcm of the cycle lengths of one pass. Raises
    ``OverflowError`` if the period exceeds ``cap``.
    """
    if m < 1:
        raise ValueError("grid size must be positive")
    dest = permutation_table(params, m)
    seen = np.zeros(dest.size, dtype=bool)
    period = 1
    for start in range(dest.size):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = dest[i]
            length += 1
        period = math.lcm(period, length)
        if period > cap:
            raise OverflowError(f"period exceeds search cap {cap}")
    return period
