"""Rotation of a sample into canonical orientation.

Angles are in degrees in screen coordinates (y down), so a positive angle
turns clockwise as displayed. The reference direction is a fixed ray from
the shape center (``+x`` by default); registration rotates the sample so the
nearest profile minimum lands on that ray.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .contour import (
    Centroid,
    MinimaSet,
    centroid_of,
    default_window,
    distance_profile,
    find_minima,
    region_centroid,
    trace_boundary,
)
from .errors import DegenerateGeometryError
from .raster import PixelCoord, as_gray, as_mask


class Vec2(NamedTuple):
    dx: float
    dy: float


def wrap_degrees(angle: float) -> float:
    """Map an angle into (-180, 180]."""
    a = math.fmod(angle, 360.0)
    if a <= -180.0:
        a += 360.0
    elif a > 180.0:
        a -= 360.0
    return a


def angle_between(a, b) -> float:
    """Signed angle from ``a`` to ``b``: atan2(a x b, a . b), in (-180, 180]."""
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    if (ax == 0.0 and ay == 0.0) or (bx == 0.0 and by == 0.0):
        raise DegenerateGeometryError("angle with a zero-length vector is undefined")
    cross = ax * by - ay * bx
    dot = ax * bx + ay * by
    return wrap_degrees(math.degrees(math.atan2(cross, dot)))


def choose_anchor(minima: MinimaSet, profile) -> int:
    """Index of the minimum nearest the center; smallest index on ties."""
    profile = np.asarray(profile, dtype=np.float64)
    return min(minima.indices, key=lambda i: (profile[i], i))


def registration_angle(path, c: Centroid, anchor: int, reference_deg: float = 0.0) -> float:
    x, y = np.asarray(path)[anchor]
    v2 = Vec2(float(x) - c.x0, float(y) - c.y0)
    if math.hypot(*v2) < 1e-12:
        raise DegenerateGeometryError("anchor point coincides with the center")
    r = math.radians(reference_deg)
    v1 = Vec2(math.cos(r), math.sin(r))
    return angle_between(v1, v2)


def _rotation(theta_deg: float):
    # snap exact multiples of 90 so right-angle rotations stay on the grid
    t = math.radians(theta_deg)
    cos, sin = round(math.cos(t), 15), round(math.sin(t), 15)
    return cos, sin


def rotation_frame(shape, center: Centroid, theta_deg: float):
    """Output shape and center position for rotating content by ``-theta_deg``.

    The canvas is the bounding box of the rotated input pixel centers, so a
    zero rotation leaves the frame unchanged.
    """
    h, w = shape
    cos, sin = _rotation(theta_deg)
    cx, cy = center
    corners = np.array([[0, 0], [w - 1, 0], [0, h - 1], [w - 1, h - 1]], dtype=np.float64)
    rx = corners[:, 0] - cx
    ry = corners[:, 1] - cy
    # forward map: R(-theta) (p - c) + c
    ox = np.round(cos * rx + sin * ry + cx, 9)
    oy = np.round(-sin * rx + cos * ry + cy, 9)
    x0, y0 = math.floor(ox.min()), math.floor(oy.min())
    out_w = math.ceil(ox.max()) - x0 + 1
    out_h = math.ceil(oy.max()) - y0 + 1
    return (out_h, out_w), Centroid(cx - x0, cy - y0)


def _source_coords(center, theta_deg, out_shape, out_center):
    cos, sin = _rotation(theta_deg)
    qy, qx = np.mgrid[0:out_shape[0], 0:out_shape[1]].astype(np.float64)
    qx -= out_center.x0
    qy -= out_center.y0
    px = center[0] + cos * qx - sin * qy
    py = center[1] + sin * qx + cos * qy
    return px, py


def rotate_image(img, center, theta_deg: float, fill: int = 0) -> np.ndarray:
    """Rotate ``img`` about ``center`` by ``-theta_deg`` with bilinear sampling.

    A feature lying at angle ``theta_deg`` from ``center`` ends up on the
    ``+x`` ray. The canvas grows to hold the whole rotated image; samples
    falling outside the source are set to ``fill``.
    """
    img = as_gray(img)
    h, w = img.shape
    center = Centroid(*center)
    out_shape, out_center = rotation_frame(img.shape, center, theta_deg)
    px, py = _source_coords(center, theta_deg, out_shape, out_center)
    eps = 1e-9
    inside = (px >= -eps) & (px <= w - 1 + eps) & (py >= -eps) & (py <= h - 1 + eps)
    px = np.clip(px, 0, w - 1)
    py = np.clip(py, 0, h - 1)
    x0 = np.floor(px).astype(np.intp)
    y0 = np.floor(py).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = px - x0
    fy = py - y0
    src = img.astype(np.float64)
    top = src[y0, x0] * (1 - fx) + src[y0, x1] * fx
    bottom = src[y1, x0] * (1 - fx) + src[y1, x1] * fx
    val = top * (1 - fy) + bottom * fy
    out = np.clip(np.floor(val + 0.5), 0, 255).astype(np.uint8)
    out[~inside] = fill
    return out


def rotate_mask(mask, center, theta_deg: float) -> np.ndarray:
    """Nearest-neighbor counterpart of :func:`rotate_image` for binary masks."""
    mask = as_mask(mask)
    h, w = mask.shape
    center = Centroid(*center)
    out_shape, out_center = rotation_frame(mask.shape, center, theta_deg)
    px, py = _source_coords(center, theta_deg, out_shape, out_center)
    xi = np.floor(px + 0.5).astype(np.intp)
    yi = np.floor(py + 0.5).astype(np.intp)
    inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
    out = np.zeros(out_shape, dtype=np.uint8)
    out[inside] = mask[yi[inside], xi[inside]]
    return out


@dataclass(frozen=True)
class RegistrationRecord:
    path: np.ndarray
    centroid: Centroid
    profile: np.ndarray
    window: int
    minima: MinimaSet
    anchor_index: int
    theta_deg: float
    registered: np.ndarray
    registered_mask: np.ndarray
    registered_center: Centroid  # where the centroid sits in the registered frame

    @property
    def anchor(self) -> PixelCoord:
        x, y = self.path[self.anchor_index]
        return PixelCoord(int(x), int(y))


def register_sample(img, mask, *, window: int | None = None,
                    centroid_mode: str = "boundary", reference_deg: float = 0.0,
                    min_prominence: float = 2.0, fill: int = 0) -> RegistrationRecord:
    """Trace, locate the nearest valley and rotate ``img`` and ``mask`` upright.

    ``centroid_mode`` is ``"boundary"`` (mean of boundary points) or
    ``"region"`` (mean of all object pixels).
    """
    img = as_gray(img)
    mask = as_mask(mask)
    if img.shape != mask.shape:
        raise ValueError(f"image {img.shape} and mask {mask.shape} differ in shape")
    path = trace_boundary(mask)
    if centroid_mode == "boundary":
        c = centroid_of(path)
    elif centroid_mode == "region":
        c = region_centroid(mask)
    else:
        raise ValueError(f"unknown centroid mode {centroid_mode!r}")
    profile = distance_profile(path, c)
    if window is None:
        window = default_window(len(path))
    minima = find_minima(profile, window, min_prominence=min_prominence)
    anchor = choose_anchor(minima, profile)
    theta = registration_angle(path, c, anchor, reference_deg)
    _, out_center = rotation_frame(img.shape, c, theta)
    return RegistrationRecord(
        path=path,
        centroid=c,
        profile=profile,
        window=window,
        minima=minima,
        anchor_index=anchor,
        theta_deg=theta,
        registered=rotate_image(img, c, theta, fill=fill),
        registered_mask=rotate_mask(mask, c, theta),
        registered_center=out_center,
    )
