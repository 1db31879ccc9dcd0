"""Image containers and file I/O.

Gray images are 2-D ``uint8`` numpy arrays indexed ``[y, x]`` (row-major,
y pointing down). Binary masks are ``uint8`` arrays holding only 0 and 1.
Only binary (P5) PGM and 8-bit grayscale/RGB PNG are read; output is always
P5 PGM.
"""
from __future__ import annotations

import io
import os
from typing import NamedTuple

import numpy as np

from .errors import FormatError

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class PixelCoord(NamedTuple):
    x: int
    y: int


def as_gray(data) -> np.ndarray:
    """Validate ``data`` as a gray image and return it as a uint8 array."""
    arr = np.asarray(data)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"gray image must be a non-empty 2-D array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if np.any(arr < 0) or np.any(arr > 255):
            raise ValueError("gray image values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def as_mask(data) -> np.ndarray:
    """Validate ``data`` as a binary mask and return it as a uint8 0/1 array."""
    arr = np.asarray(data)
    if arr.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("mask values must be exactly 0 or 1")
    return arr.astype(np.uint8)


def luminance(rgb: np.ndarray) -> np.ndarray:
    """round(0.299 R + 0.587 G + 0.114 B) for an ``(h, w, 3)`` array."""
    rgb = np.asarray(rgb, dtype=np.float64)
    lum = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.floor(lum + 0.5), 0, 255).astype(np.uint8)


def _read_pgm(raw: bytes, path) -> np.ndarray:
    tokens = []
    pos = 0
    n = len(raw)
    while len(tokens) < 4:
        while pos < n and raw[pos:pos + 1].isspace():
            pos += 1
        if pos < n and raw[pos:pos + 1] == b"#":
            while pos < n and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not raw[pos:pos + 1].isspace() and raw[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PGM header")
        tokens.append(raw[start:pos])
    # exactly one whitespace byte separates header and raster
    if pos >= n or not raw[pos:pos + 1].isspace():
        raise FormatError(f"{path}: truncated PGM header")
    pos += 1
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise FormatError(f"{path}: non-numeric PGM header field") from None
    if width < 1 or height < 1:
        raise FormatError(f"{path}: invalid PGM dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"{path}: unsupported PGM maxval {maxval} (only 255 is accepted)")
    body = raw[pos:pos + width * height]
    if len(body) != width * height:
        raise FormatError(
            f"{path}: PGM raster truncated ({len(body)} of {width * height} bytes)")
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width).copy()


def _read_png(raw: bytes, path) -> np.ndarray:
    from PIL import Image

    try:
        with Image.open(io.BytesIO(raw)) as im:
            im.load()
            mode = im.mode
            if mode == "L":
                return np.array(im, dtype=np.uint8)
            if mode == "RGB":
                return luminance(np.array(im, dtype=np.uint8))
    except (OSError, SyntaxError) as exc:
        raise FormatError(f"{path}: unreadable PNG ({exc})") from None
    raise FormatError(f"{path}: unsupported PNG mode {mode!r} (need 8-bit L or RGB)")


def load_gray(path) -> np.ndarray:
    """Read a P5 PGM or 8-bit grayscale/RGB PNG into a uint8 array.

    Raises ``OSError`` when the file cannot be read and
    :class:`~palmreg.errors.FormatError` for anything that is not a supported
    8-bit container.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:2] == b"P5":
        return _read_pgm(raw, path)
    if raw[:8] == _PNG_MAGIC:
        return _read_png(raw, path)
    raise FormatError(f"{path}: not a P5 PGM or PNG file (magic {raw[:4]!r})")


def save_gray(img, path) -> None:
    """Write ``img`` as a binary P5 PGM with maxval 255."""
    img = as_gray(img)
    h, w = img.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(img).tobytes())
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write PGM to {os.fspath(path)!r}: {exc.strerror}") from exc


def binary_to_gray(mask) -> np.ndarray:
    return as_mask(mask) * np.uint8(255)
