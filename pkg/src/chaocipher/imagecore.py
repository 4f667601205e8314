"""Pixel container, lossless image I/O and the canonical byte ordering.

Images are held as ``(M, N, 3)`` uint8 arrays indexed ``[x, y, z]`` with
``x`` the row, ``y`` the column and ``z`` in ``0, 1, 2`` for R, G, B. The
linear scan order used everywhere is row-major, channel-fastest::

    i = (x * N + y) * 3 + z

which is exactly NumPy's C-order flattening of the array.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

CHANNEL_LABELS = ("R", "G", "B")
PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

LOSSLESS_FORMATS = {".ppm": "PPM", ".pnm": "PPM", ".png": "PNG"}
LOSSY_SUFFIXES = {".jpg", ".jpeg", ".jpe", ".jfif", ".webp", ".gif", ".heic", ".avif"}


class ImageFormatError(ValueError):
    """The file cannot be read or written as a lossless 8-bit RGB raster."""


@dataclass(frozen=True, eq=False)
class ColorImage:
    """An ``M x N x 3`` grid of 8-bit gray values.

    The backing array is copied on construction and made read-only.
    """

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected an (M, N, 3) array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image dimensions must be positive")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(f"pixel values must be integers, got {arr.dtype}")
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("pixel values must lie in [0, 255]")
        arr = np.array(arr, dtype=np.uint8, order="C", copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.pixels.shape  # type: ignore[return-value]

    @property
    def is_square(self) -> bool:
        return self.height == self.width

    def channel(self, label: str | int) -> Channel:
        z = _channel_index(label)
        return Channel(self.pixels[:, :, z].ravel(), CHANNEL_LABELS[z])

    def channels(self) -> list[Channel]:
        return [self.channel(z) for z in range(3)]

    def __getitem__(self, pos: tuple[int, int, int]) -> int:
        return int(self.pixels[pos])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColorImage):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.pixels, other.pixels)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"ColorImage({self.height}x{self.width}x3)"


@dataclass(frozen=True, eq=False)
class Channel:
    """One color plane, flattened row-major to ``M * N`` values."""

    values: np.ndarray
    label: str

    def __post_init__(self) -> None:
        if self.label not in CHANNEL_LABELS:
            raise ValueError(f"unknown channel label {self.label!r}")
        arr = np.asarray(self.values)
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("channel values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "values", arr.ravel())

    def __len__(self) -> int:
        return self.values.size


def _channel_index(label: str | int) -> int:
    if isinstance(label, str):
        try:
            return CHANNEL_LABELS.index(label.upper())
        except ValueError:
            raise ValueError(f"unknown channel label {label!r}") from None
    if label not in (0, 1, 2):
        raise ValueError(f"channel index must be 0, 1 or 2, got {label!r}")
    return int(label)


def linearize(img: ColorImage) -> np.ndarray:
    """Flatten to the canonical ``(x * N + y) * 3 + z`` byte order."""
    return img.pixels.reshape(-1).copy()


def delinearize(seq, m: int, n: int) -> ColorImage:
    arr = np.asarray(seq)
    if arr.ndim != 1 or arr.size != m * n * 3:
        raise ValueError(f"sequence length {arr.size} does not match {m}x{n}x3 = {m * n * 3}")
    return ColorImage(arr.reshape(m, n, 3))


def gray_value_sum(img: ColorImage) -> int:
    """Exact integer sum of all ``M * N * 3`` gray values."""
    return int(img.pixels.sum(dtype=np.uint64))


def histogram(ch: Channel) -> np.ndarray:
    """Occurrence count of each gray level 0..255."""
    return np.bincount(ch.values, minlength=256).astype(np.int64)


def _read_ppm(data: bytes, path) -> np.ndarray:
    # header: "P6", width, height, maxval, separated by whitespace, '#' comments allowed
    fields: list[bytes] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError(f"{path}: truncated PPM header")
        fields.append(data[start:pos])
    if not all(f.isdigit() for f in fields):
        raise ImageFormatError(f"{path}: malformed PPM header")
    width, height, maxval = (int(f) for f in fields)
    if maxval != 255:
        raise ImageFormatError(f"{path}: PPM maxval {maxval}; only 8-bit (255) is supported")
    if width < 1 or height < 1:
        raise ImageFormatError(f"{path}: PPM has empty dimensions")
    pos += 1  # exactly one whitespace byte before the raster
    need = width * height * 3
    raster = data[pos:pos + need]
    if len(raster) != need:
        raise ImageFormatError(f"{path}: PPM raster truncated ({len(raster)} of {need} bytes)")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)


def load_image(path: str | os.PathLike, *, strip_alpha: bool = False) -> ColorImage:
    """Read a PPM (P6) or PNG file without any lossy conversion.

    Alpha is rejected unless ``strip_alpha`` is set, in which case it is
    dropped. Palette, grayscale, 16-bit and lossy-codec files are rejected.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ImageFormatError(f"{path}: cannot read file ({exc})") from exc
    if data[:2] == b"P6":
        return ColorImage(_read_ppm(data, path))
    if data[:8] == PNG_SIGNATURE and data[12:16] == b"IHDR":
        # Pillow silently narrows 16-bit RGB to 8 bits; refuse before decoding
        depth, color_type = data[24], data[25]
        if depth != 8 or color_type not in (2, 6):
            raise ImageFormatError(f"{path}: PNG must be 8-bit RGB(A), got bit depth {depth}, color type {color_type}")
    try:
        with Image.open(io.BytesIO(data)) as im:
            if im.format != "PNG":
                raise ImageFormatError(f"{path}: unsupported container {im.format}; re-encode as PNG or PPM")
            mode = im.mode
            if mode not in ("RGB", "RGBA"):
                raise ImageFormatError(f"{path}: expected 8-bit RGB, got mode {mode}")
            if mode == "RGBA" and not strip_alpha:
                raise ImageFormatError(f"{path}: image has an alpha channel (use strip_alpha to drop it)")
            im.load()
            arr = np.asarray(im, dtype=np.uint8)
    except ImageFormatError:
        raise
    except (OSError, UnidentifiedImageError, SyntaxError, ValueError) as exc:
        raise ImageFormatError(f"{path}: cannot decode image ({exc})") from exc
    return ColorImage(arr[:, :, :3])


def container_for(path: str | os.PathLike) -> str:
    """Container name for an output path; unknown suffixes fall back to PPM."""
    suffix = Path(path).suffix.lower()
    if suffix in LOSSY_SUFFIXES:
        raise ImageFormatError(f"{path}: {suffix} is a lossy container; use .png or .ppm")
    return LOSSLESS_FORMATS.get(suffix, "PPM")


def save_image(img: ColorImage, path: str | os.PathLike) -> None:
    fmt = container_for(path)
    im = Image.fromarray(img.pixels)
    try:
        im.save(path, format=fmt)
    except OSError as exc:
        raise ImageFormatError(f"{path}: cannot write image ({exc})") from exc
