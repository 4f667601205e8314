"""Two-dimensional hyper-chaotic map and the byte keystreams derived from it.

The map::

    x[n+1] = a1*x[n] - a2*y[n]**2
    y[n+1] = a3*x[n] - a4*y[n]

is iterated in plain binary64 with the operation order fixed as written.
Every iterate is reduced to ``frac(1e6 * v)`` and then to
``floor(u * 1e14) mod 256``. The reduction never feeds back into the
dynamics.

Not every parameter set gives a bounded orbit. In particular the commonly
quoted ``x0=0.2159, y0=0.5738, a1=1.55, a2=1.3, a3=1.1, a4=0.1`` escapes to
infinity within a few dozen steps. Unbounded orbits raise
:class:`TrajectoryDivergedError` rather than yielding a degenerate stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

PREPROCESS_SCALE = 1e6
QUANTIZE_SCALE = 1e14
_BELOW_ONE = math.nextafter(1.0, 0.0)


class TrajectoryDivergedError(ArithmeticError):
    """An iterate became inf or nan; the parameters are unusable as a key."""

    def __init__(self, step: int):
        super().__init__(f"trajectory left the finite range at iterate {step}")
        self.step = step


@dataclass(frozen=True)
class ChaosParams:
    x0: float
    y0: float
    a1: float
    a2: float
    a3: float
    a4: float

    FIELDS = ("x0", "y0", "a1", "a2", "a3", "a4")

    def __post_init__(self) -> None:
        for name in self.FIELDS:
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)

    def perturbed(self, field: str, delta: float) -> ChaosParams:
        if field not in self.FIELDS:
            raise KeyError(field)
        return replace(self, **{field: getattr(self, field) + delta})


# Values printed alongside the original scheme; they diverge under the map above.
PAPER_REFERENCE = ChaosParams(x0=0.2159, y0=0.5738, a1=1.55, a2=1.3, a3=1.1, a4=0.1)

# A bounded, chaotic configuration used for demos and tests.
DEMO_PARAMS = ChaosParams(x0=1.0, y0=1.0, a1=1.9, a2=1.0, a3=1.1, a4=1.4)


class RawTrajectory(NamedTuple):
    xs: np.ndarray
    ys: np.ndarray


class KeystreamPair(NamedTuple):
    k1: np.ndarray
    k2: np.ndarray


def iterate(params: ChaosParams, count: int) -> RawTrajectory:
    """Return the first ``count`` iterates after ``(x0, y0)``.

    Raises:
        TrajectoryDivergedError: if any iterate is not finite.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    a1, a2, a3, a4 = params.a1, params.a2, params.a3, params.a4
    x, y = params.x0, params.y0
    xs = [0.0] * count
    ys = [0.0] * count
    isfinite = math.isfinite
    for i in range(count):
        x, y = a1 * x - a2 * (y * y), a3 * x - a4 * y
        if not (isfinite(x) and isfinite(y)):
            raise TrajectoryDivergedError(i + 1)
        xs[i] = x
        ys[i] = y
    return RawTrajectory(np.array(xs), np.array(ys))


def preprocess(v):
    """Fractional part of ``1e6 * v`` via floor, so always in [0, 1).

    Works elementwise on arrays. A result that rounds up to exactly 1.0
    (tiny negative inputs) is pinned to the largest double below 1.
    """
    w = np.multiply(PREPROCESS_SCALE, v)
    u = w - np.floor(w)
    u = np.minimum(u, _BELOW_ONE)
    return float(u) if np.ndim(u) == 0 else u


def quantize(u):
    """``floor(u * 1e14) mod 256``; exact because the product is below 2**53."""
    scaled = np.floor(np.multiply(u, QUANTIZE_SCALE)).astype(np.int64)
    out = (scaled & 0xFF).astype(np.uint8)
    return int(out) if np.ndim(out) == 0 else out


def generate_keystreams(params: ChaosParams, length: int) -> KeystreamPair:
    raw = iterate(params, length)
    return KeystreamPair(quantize(preprocess(raw.xs)), quantize(preprocess(raw.ys)))


def export_binary(pair: KeystreamPair) -> bytes:
    """K1 followed by K2 as raw bytes."""
    return pair.k1.tobytes() + pair.k2.tobytes()


def export_csv(pair: KeystreamPair) -> str:
    lines = ["index,k1,k2"]
    lines.extend(f"{i},{a},{b}" for i, (a, b) in enumerate(zip(pair.k1.tolist(), pair.k2.tolist())))
    return "\n".join(lines) + "\n"
