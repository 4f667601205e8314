import struct
import zlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from chaocipher.imagecore import (
    Channel,
    ColorImage,
    ImageFormatError,
    delinearize,
    gray_value_sum,
    histogram,
    linearize,
    load_image,
    save_image,
)

from conftest import random_image


def write_ppm(path, m, n, payload: bytes, maxval=255):
    path.write_bytes(f"P6\n{n} {m}\n{maxval}\n".encode() + payload)


def test_load_black_ppm(tmp_path):
    p = tmp_path / "black.ppm"
    write_ppm(p, 2, 2, bytes(12))
    img = load_image(p)
    assert img.shape == (2, 2, 3)
    assert not img.pixels.any()


def test_load_single_red_pixel(tmp_path):
    p = tmp_path / "red.ppm"
    write_ppm(p, 1, 1, bytes([255, 0, 0]))
    img = load_image(p)
    assert img[0, 0, 0] == 255
    assert img[0, 0, 1] == 0 and img[0, 0, 2] == 0


def test_ppm_header_is_rows_then_columns_in_scan_order(tmp_path):
    # 1 row, 2 columns: width first in the header
    p = tmp_path / "wide.ppm"
    write_ppm(p, 1, 2, bytes([1, 2, 3, 4, 5, 6]))
    img = load_image(p)
    assert img.shape == (1, 2, 3)
    assert linearize(img).tolist() == [1, 2, 3, 4, 5, 6]


@pytest.mark.parametrize("suffix", [".ppm", ".png"])
@pytest.mark.parametrize("size", [(16, 16), (8, 8), (5, 9)])
def test_save_load_round_trip(tmp_path, rng, suffix, size):
    img = random_image(rng, *size)
    path = tmp_path / f"img{suffix}"
    save_image(img, path)
    back = load_image(path)
    assert back == img
    assert gray_value_sum(back) == gray_value_sum(img)


def test_zero_image_saves_as_zeros(tmp_path):
    img = ColorImage(np.zeros((4, 4, 3), np.uint8))
    save_image(img, tmp_path / "z.png")
    assert not np.asarray(Image.open(tmp_path / "z.png")).any()


def test_png_written_as_8bit_rgb(tmp_path, rng):
    save_image(random_image(rng, 4), tmp_path / "x.png")
    with Image.open(tmp_path / "x.png") as im:
        assert im.format == "PNG" and im.mode == "RGB"
        assert not im.info.get("interlace")


def test_unknown_suffix_defaults_to_ppm(tmp_path, rng):
    save_image(random_image(rng, 3), tmp_path / "out.img")
    assert (tmp_path / "out.img").read_bytes().startswith(b"P6")


def test_lossy_output_rejected(tmp_path, rng):
    with pytest.raises(ImageFormatError):
        save_image(random_image(rng, 4), tmp_path / "out.jpg")


def test_jpeg_input_rejected(tmp_path, rng):
    Image.fromarray(random_image(rng, 8).pixels).save(tmp_path / "in.jpg")
    with pytest.raises(ImageFormatError, match="unsupported"):
        load_image(tmp_path / "in.jpg")


def test_alpha_rejected_unless_stripped(tmp_path, rng):
    rgba = rng.integers(0, 256, (4, 4, 4), dtype=np.uint8)
    Image.fromarray(rgba).save(tmp_path / "a.png")
    with pytest.raises(ImageFormatError, match="alpha"):
        load_image(tmp_path / "a.png")
    img = load_image(tmp_path / "a.png", strip_alpha=True)
    assert np.array_equal(img.pixels, rgba[:, :, :3])


def test_grayscale_and_16bit_rejected(tmp_path):
    Image.fromarray(np.zeros((4, 4), np.uint8)).save(tmp_path / "g.png")
    with pytest.raises(ImageFormatError):
        load_image(tmp_path / "g.png")
    write_ppm(tmp_path / "deep.ppm", 1, 1, bytes(6), maxval=65535)
    with pytest.raises(ImageFormatError):
        load_image(tmp_path / "deep.ppm")


def _png_16bit_rgb() -> bytes:
    w = h = 2
    raw = b"".join(b"\x00" + bytes(w * 6) for _ in range(h))

    def chunk(tag, body):
        return struct.pack(">I", len(body)) + tag + body + struct.pack(">I", zlib.crc32(tag + body))

    ihdr = struct.pack(">IIBBBBB", w, h, 16, 2, 0, 0, 0)
    return b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr) + chunk(b"IDAT", zlib.compress(raw)) + chunk(b"IEND", b"")


def test_16bit_png_rejected(tmp_path):
    p = tmp_path / "deep.png"
    p.write_bytes(_png_16bit_rgb())
    with pytest.raises(ImageFormatError, match="bit depth 16"):
        load_image(p)


def test_ppm_header_comments(tmp_path):
    p = tmp_path / "c.ppm"
    p.write_bytes(b"P6\n# made by hand\n1 1\n255\n" + bytes([9, 8, 7]))
    assert linearize(load_image(p)).tolist() == [9, 8, 7]


def test_truncated_and_missing_files(tmp_path):
    p = tmp_path / "t.ppm"
    write_ppm(p, 4, 4, bytes(20))
    with pytest.raises(ImageFormatError):
        load_image(p)
    with pytest.raises(ImageFormatError):
        load_image(tmp_path / "nope.png")


def test_linearize_single_pixel():
    img = ColorImage(np.array([[[7, 8, 9]]]))
    assert linearize(img).tolist() == [7, 8, 9]


def test_linearize_scan_order_matches_index_formula(rng):
    img = random_image(rng, 3, 5)
    seq = linearize(img)
    assert seq.size == 3 * 5 * 3
    for x in range(3):
        for y in range(5):
            for z in range(3):
                assert seq[(x * 5 + y) * 3 + z] == img[x, y, z]


def test_delinearize_examples():
    assert delinearize([7, 8, 9], 1, 1) == ColorImage(np.array([[[7, 8, 9]]]))
    two = delinearize([0] * 6, 1, 2)
    assert two.shape == (1, 2, 3) and not two.pixels.any()
    with pytest.raises(ValueError):
        delinearize([1, 2, 3, 4], 1, 1)


@settings(max_examples=50, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9), st.just(3))))
def test_delinearize_inverts_linearize(pixels):
    img = ColorImage(pixels)
    assert delinearize(linearize(img), img.height, img.width) == img


def test_gray_value_sum_examples(rng):
    assert gray_value_sum(ColorImage(np.zeros((3, 3, 3), np.uint8))) == 0
    assert gray_value_sum(ColorImage(np.full((1, 1, 3), 255, np.uint8))) == 765
    img = random_image(rng, 16)
    naive = 0
    for x in range(16):
        for y in range(16):
            for z in range(3):
                naive += img[x, y, z]
    assert gray_value_sum(img) == naive


def test_gray_value_sum_does_not_overflow_narrow_types():
    img = ColorImage(np.full((512, 512, 3), 255, np.uint8))
    assert gray_value_sum(img) == 512 * 512 * 3 * 255
    assert isinstance(gray_value_sum(img), int)


def test_histogram_examples(rng):
    assert histogram(Channel(np.full(4, 5), "R")).tolist() == [0] * 5 + [4] + [0] * 250
    assert (histogram(Channel(np.arange(256), "G")) == 1).all()
    values = rng.integers(0, 256, 1000)
    counts = [0] * 256
    for v in values:
        counts[v] += 1
    assert histogram(Channel(values, "B")).tolist() == counts


@settings(max_examples=30, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12), st.just(3))))
def test_histogram_counts_sum_to_pixel_count(pixels):
    img = ColorImage(pixels)
    for ch in img.channels():
        assert histogram(ch).sum() == img.height * img.width


def test_color_image_validation():
    with pytest.raises(ValueError):
        ColorImage(np.zeros((2, 2), np.uint8))
    with pytest.raises(ValueError):
        ColorImage(np.full((1, 1, 3), 256))
    with pytest.raises(ValueError):
        ColorImage(np.zeros((1, 1, 3), float))
    img = ColorImage(np.zeros((1, 1, 3), np.uint8))
    with pytest.raises(ValueError):
        img.pixels[0, 0, 0] = 1


def test_channel_labels(rng):
    img = random_image(rng, 4)
    assert [c.label for c in img.channels()] == ["R", "G", "B"]
    assert np.array_equal(img.channel("g").values, img.pixels[:, :, 1].ravel())
    assert len(img.channel(2)) == 16
