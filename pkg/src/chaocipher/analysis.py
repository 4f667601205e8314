"""Statistical quality measures for cipher images.

Chi-square against a flat histogram, adjacent-pixel Pearson correlation,
Shannon entropy, NPCR and key sensitivity, plus a JSON / text report.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cipher import KEY_FIELDS, CipherKey, encrypt
from .hyperchaos import TrajectoryDivergedError
from .imagecore import CHANNEL_LABELS, Channel, ColorImage, histogram

DIRECTIONS = {
    "horizontal": (0, 1),
    "vertical": (1, 0),
    "diagonal": (1, 1),
}
DEFAULT_SAMPLES = 4096
DEFAULT_SEED = 0
DEFAULT_DELTA = 1e-14


class UndefinedCorrelationError(ValueError):
    """One side of the sampled pairs has zero variance."""


def chi_square(ch: Channel) -> float:
    """Sum of (O_i - E_i)^2 / E_i over the 256 gray levels, E_i = len/256."""
    total = len(ch)
    if total == 0:
        raise ValueError("chi-square of an empty channel is undefined")
    if total < 256:
        warnings.warn(f"only {total} samples; expected count per level is below 1", stacklevel=2)
    expected = total / 256
    observed = histogram(ch).astype(np.float64)
    return float(np.sum((observed - expected) ** 2) / expected)


def shannon_entropy(ch: Channel) -> float:
    total = len(ch)
    if total == 0:
        raise ValueError("entropy of an empty channel is undefined")
    counts = histogram(ch)
    p = counts[counts > 0] / total
    return float(max(0.0, -np.sum(p * np.log2(p))))


def npcr(p: ColorImage, c: ColorImage, channel: str | int) -> float:
    """Percentage of positions in one channel where the two images differ."""
    if p.shape != c.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {c.shape}")
    a = p.channel(channel).values
    b = c.channel(channel).values
    return 100.0 * np.count_nonzero(a != b) / a.size


def sample_adjacent_pairs(img: ColorImage, direction: str, sample_count: int = DEFAULT_SAMPLES,
                          seed: int = DEFAULT_SEED) -> tuple[np.ndarray, np.ndarray]:
    """Draw neighbour pairs uniformly, with replacement, from all three channels."""
    try:
        dx, dy = DIRECTIONS[direction]
    except KeyError:
        raise ValueError(f"direction must be one of {sorted(DIRECTIONS)}, got {direction!r}") from None
    if sample_count < 1:
        raise ValueError("sample_count must be positive")
    rows, cols = img.height - dx, img.width - dy
    if rows < 1 or cols < 1:
        raise ValueError(f"image {img.height}x{img.width} has no {direction} neighbours")
    rng = np.random.default_rng(seed)
    x = rng.integers(0, rows, sample_count)
    y = rng.integers(0, cols, sample_count)
    z = rng.integers(0, 3, sample_count)
    px = img.pixels
    return px[x, y, z].astype(np.float64), px[x + dx, y + dy, z].astype(np.float64)


def pearson(u: np.ndarray, v: np.ndarray) -> float:
    du = u - u.mean()
    dv = v - v.mean()
    su = float(np.dot(du, du))
    sv = float(np.dot(dv, dv))
    if su == 0.0 or sv == 0.0:
        raise UndefinedCorrelationError("correlation undefined: a sampled marginal is constant")
    r = float(np.dot(du, dv)) / math.sqrt(su * sv)
    return min(1.0, max(-1.0, r))


def adjacent_correlation(img: ColorImage, direction: str, sample_count: int = DEFAULT_SAMPLES,
                         seed: int = DEFAULT_SEED) -> float:
    """Pearson r between randomly sampled pixels and their neighbour.

    Raises:
        UndefinedCorrelationError: if either side of the sample is constant.
    """
    u, v = sample_adjacent_pairs(img, direction, sample_count, seed)
    return pearson(u, v)


def key_sensitivity(plain: ColorImage, key: CipherKey, component: str, delta=DEFAULT_DELTA) -> float:
    """Percent of ciphertext bytes that change when one key field is nudged.

    ``c0`` takes an integer delta (wrapping mod 256); the chaos fields take a
    real one. A perturbed key whose orbit diverges raises
    ``TrajectoryDivergedError``.
    """
    if component not in KEY_FIELDS:
        raise ValueError(f"unknown key component {component!r}")
    if component != "c0":
        base = getattr(key.chaos, component)
        if delta != 0 and base + delta == base:
            raise ValueError(f"delta {delta} vanishes against {component}={base} in binary64")
    c1 = encrypt(plain, key).pixels
    c2 = encrypt(plain, key.perturbed(component, delta)).pixels
    return 100.0 * np.count_nonzero(c1 != c2) / c1.size


@dataclass
class MetricsReport:
    chi_square: dict[str, float]
    correlation: dict[str, float | None]
    entropy: dict[str, float]
    npcr: dict[str, float]
    key_sensitivity: dict[str, float | None] | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "chi_square": self.chi_square,
            "correlation": self.correlation,
            "entropy": self.entropy,
            "npcr": self.npcr,
        }
        if self.key_sensitivity is not None:
            out["key_sensitivity"] = self.key_sensitivity
        if self.notes:
            out["notes"] = self.notes
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def to_table(self) -> str:
        lines = []
        lines.append(f"{'Metric':<22}{'R':>12}{'G':>12}{'B':>12}")
        for title, data in (("Chi-square", self.chi_square), ("Entropy", self.entropy), ("NPCR (%)", self.npcr)):
            lines.append(f"{title:<22}" + "".join(f"{data[k]:>12.4f}" for k in "rgb"))
        lines.append("")
        lines.append(f"{'Correlation':<22}{'Horizontal':>12}{'Vertical':>12}{'Diagonal':>12}")
        lines.append(f"{'':<22}" + "".join(_fmt(self.correlation[d]) for d in DIRECTIONS))
        if self.key_sensitivity is not None:
            lines.append("")
            lines.append("Key sensitivity (% bytes changed)")
            for k, v in self.key_sensitivity.items():
                lines.append(f"  {k:<20}{_fmt(v)}")
        return "\n".join(lines) + "\n"


def _fmt(v: float | None) -> str:
    return f"{'undefined':>12}" if v is None else f"{v:>12.4f}"


def analyze(plain: ColorImage, cipher: ColorImage, key: CipherKey | None = None, *,
            seed: int = DEFAULT_SEED, sample_count: int = DEFAULT_SAMPLES,
            delta: float = DEFAULT_DELTA) -> MetricsReport:
    """Measure ``cipher`` (and its relation to ``plain``) in one report."""
    if plain.shape != cipher.shape:
        raise ValueError(f"dimension mismatch: {plain.shape} vs {cipher.shape}")
    notes: list[str] = []
    labels = [c.lower() for c in CHANNEL_LABELS]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        chi = {lab: chi_square(cipher.channel(z)) for z, lab in enumerate(labels)}
    ent = {lab: shannon_entropy(cipher.channel(z)) for z, lab in enumerate(labels)}
    change = {lab: npcr(plain, cipher, z) for z, lab in enumerate(labels)}
    corr: dict[str, float | None] = {}
    for direction in DIRECTIONS:
        try:
            corr[direction] = adjacent_correlation(cipher, direction, sample_count, seed)
        except (UndefinedCorrelationError, ValueError) as exc:
            corr[direction] = None
            notes.append(f"correlation.{direction}: {exc}")
    sens = None
    if key is not None:
        sens = {}
        for comp in KEY_FIELDS:
            try:
                sens[comp] = key_sensitivity(plain, key, comp, 1 if comp == "c0" else delta)
            except (TrajectoryDivergedError, ValueError) as exc:
                sens[comp] = None
                notes.append(f"key_sensitivity.{comp}: {exc}")
    return MetricsReport(chi, corr, ent, change, sens, notes)
