import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from palmreg.errors import FormatError
from palmreg.raster import binary_to_gray, load_gray, luminance, save_gray


def test_load_p5_bytes(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    img = load_gray(path)
    assert img.shape == (2, 2)
    assert img.ravel().tolist() == [0, 255, 128, 64]


def test_load_pgm_with_comment(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5 # made by hand\n3 1\n# maxval next\n255\n" + bytes([1, 2, 3]))
    assert load_gray(path).tolist() == [[1, 2, 3]]


@pytest.mark.parametrize("raw", [
    b"P5\n2 2\n",
    b"P5\n2",
    b"P5\n2 2\n255\n" + bytes([1, 2, 3]),
    b"P5\n2 2\n65535\n" + bytes(8),
    b"P5\nx 2\n255\n" + bytes(4),
])
def test_malformed_pgm(tmp_path, raw):
    path = tmp_path / "bad.pgm"
    path.write_bytes(raw)
    with pytest.raises(FormatError):
        load_gray(path)


def test_unknown_container(tmp_path):
    path = tmp_path / "x.bmp"
    path.write_bytes(b"BM" + bytes(64))
    with pytest.raises(FormatError, match="not a P5 PGM or PNG"):
        load_gray(path)


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_gray(tmp_path / "nope.pgm")


def test_png_gray_and_rgb(tmp_path):
    gray = np.array([[0, 10], [200, 255]], dtype=np.uint8)
    Image.fromarray(gray).save(tmp_path / "g.png")
    assert np.array_equal(load_gray(tmp_path / "g.png"), gray)

    rgb = np.zeros((1, 3, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 255, 255)
    rgb[0, 1] = (255, 0, 0)
    rgb[0, 2] = (10, 20, 30)
    Image.fromarray(rgb).save(tmp_path / "c.png")
    out = load_gray(tmp_path / "c.png")
    # round(0.299*255) = 76; 0.299*10 + 0.587*20 + 0.114*30 = 18.15
    assert out.tolist() == [[255, 76, 18]]


def test_png_16bit_rejected(tmp_path):
    Image.fromarray(np.zeros((2, 2), dtype=np.uint16)).save(tmp_path / "d.png")
    with pytest.raises(FormatError, match="mode"):
        load_gray(tmp_path / "d.png")


def test_single_pixel_file_body(tmp_path):
    path = tmp_path / "one.pgm"
    save_gray(np.zeros((1, 1), dtype=np.uint8), path)
    raw = path.read_bytes()
    assert raw == b"P5\n1 1\n255\n\x00"


def test_save_into_missing_directory(tmp_path):
    with pytest.raises(OSError, match="missing"):
        save_gray(np.zeros((2, 2), dtype=np.uint8), tmp_path / "missing" / "x.pgm")


@settings(max_examples=50, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12))))
def test_pgm_round_trip(tmp_path_factory, img):
    path = tmp_path_factory.mktemp("rt") / "img.pgm"
    save_gray(img, path)
    back = load_gray(path)
    assert back.dtype == np.uint8
    assert np.array_equal(back, img)


def test_luminance_of_gray_triples():
    v = np.arange(256, dtype=np.uint8)
    rgb = np.stack([v, v, v], axis=-1)[None]
    assert np.array_equal(luminance(rgb)[0], v)


def test_binary_to_gray():
    assert binary_to_gray(np.array([[0, 1]])).tolist() == [[0, 255]]
    assert not binary_to_gray(np.zeros((3, 4), dtype=np.uint8)).any()
    assert binary_to_gray(np.zeros((480, 640), dtype=np.uint8)).shape == (480, 640)
