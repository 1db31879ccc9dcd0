"""Boundary tracing, shape center and the centroid-distance signature."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateShapeError, EmptyInputError, InsufficientStructureError
from .raster import as_mask

MIN_COMPONENT_PIXELS = 8

# Moore neighborhood, clockwise on screen (y down), starting west.
_OFFSETS = ((-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1))
_DIR_OF = {off: k for k, off in enumerate(_OFFSETS)}


class Centroid(NamedTuple):
    x0: float
    y0: float


@dataclass(frozen=True)
class MinimaSet:
    """Boundary indices of the selected profile minima, nearest first."""

    indices: tuple
    values: tuple


def trace_boundary(mask) -> np.ndarray:
    """Moore-neighbor trace of the outer boundary, clockwise on screen.

    Starts at the first object pixel in raster order (entered from the west)
    and stops when the first move is about to be repeated (Jacob's
    criterion). Returns an ``(n, 2)`` int array of ``(x, y)`` points; the
    closing step from the last point back to the first is implicit. A
    one-pixel-wide protrusion is walked on both sides, so its pixels appear
    twice.

    Pixels outside the image count as background. If the mask holds several
    components only the one containing the first raster pixel is traced.
    """
    mask = as_mask(mask)
    npix = int(mask.sum())
    if npix == 0:
        raise EmptyInputError("cannot trace the boundary of an empty mask")
    if npix < MIN_COMPONENT_PIXELS:
        raise DegenerateShapeError(
            f"object has {npix} pixels, need at least {MIN_COMPONENT_PIXELS}")
    grid = np.pad(mask, 1).astype(bool)
    first = int(np.flatnonzero(grid)[0])
    start = (first % grid.shape[1], first // grid.shape[1])

    points = [start]
    p, back = start, 0
    first_move = None
    for _ in range(8 * npix + 16):
        for step in range(1, 9):
            k = (back + step) % 8
            dx, dy = _OFFSETS[k]
            c = (p[0] + dx, p[1] + dy)
            if grid[c[1], c[0]]:
                break
        else:
            # isolated pixel; unreachable given the size check, kept for safety
            break
        pdx, pdy = _OFFSETS[(k - 1) % 8]
        back = _DIR_OF[(p[0] + pdx - c[0], p[1] + pdy - c[1])]
        if first_move is None:
            first_move = (p, c)
        elif (p, c) == first_move:
            points.pop()  # the start pixel was appended on re-entry
            break
        points.append(c)
        p = c
    else:
        raise RuntimeError("boundary trace did not terminate")
    return np.asarray(points, dtype=np.int64) - 1


def centroid_of(path) -> Centroid:
    """Mean of the boundary point coordinates."""
    path = np.asarray(path, dtype=np.float64)
    if path.size == 0:
        raise EmptyInputError("centroid of an empty boundary path")
    x0, y0 = path.mean(axis=0)
    return Centroid(float(x0), float(y0))


def region_centroid(mask) -> Centroid:
    """Mean position of all object pixels (the filled-region center of mass)."""
    ys, xs = np.nonzero(as_mask(mask))
    if xs.size == 0:
        raise EmptyInputError("centroid of an empty mask")
    return Centroid(float(xs.mean()), float(ys.mean()))


def distance_profile(path, c: Centroid) -> np.ndarray:
    path = np.asarray(path, dtype=np.float64)
    return np.hypot(path[:, 0] - c.x0, path[:, 1] - c.y0)


def default_window(n_points: int) -> int:
    return max(5, int(round(n_points / 100)))


def smooth_profile(profile, window: int) -> np.ndarray:
    """Centered circular moving average over ``2 * (window // 2) + 1`` samples."""
    p = np.asarray(profile, dtype=np.float64)
    half = window // 2
    if half == 0:
        return p.copy()
    ext = np.concatenate([p[-half:], p, p[:half]])
    csum = np.concatenate([[0.0], np.cumsum(ext)])
    width = 2 * half + 1
    return (csum[width:] - csum[:-width]) / width


def _prominence(s: np.ndarray, i: int) -> float:
    r = np.roll(s, -i)
    lower = np.flatnonzero(r < r[0])
    if lower.size == 0:
        return float(r.max() - r[0])
    right = r[:lower[0]].max()
    left = r[lower[-1] + 1:].max()
    return float(min(right, left) - r[0])


def _descend(p: np.ndarray, k: int):
    """Walk downhill from ``k`` to a circular local minimum of ``p``.

    The stopping point is no greater than either neighbor and strictly below
    at least one. Returns None for a constant profile.
    """
    n = p.size
    for _ in range(2 * n + 2):
        left, right = p[(k - 1) % n], p[(k + 1) % n]
        if left < p[k] or right < p[k]:
            k = (k - 1) % n if left <= right else (k + 1) % n
            continue
        if left > p[k] or right > p[k]:
            return k
        # flat on both sides: find the plateau ends
        hi = k
        for _ in range(n):
            if p[(hi + 1) % n] != p[k]:
                break
            hi = (hi + 1) % n
        else:
            return None
        lo = k
        while p[(lo - 1) % n] == p[k]:
            lo = (lo - 1) % n
        if p[(hi + 1) % n] < p[k]:
            k = (hi + 1) % n
        elif p[(lo - 1) % n] < p[k]:
            k = (lo - 1) % n
        else:
            return lo
    raise RuntimeError("descent did not terminate")


def _circular_gap(a: int, b: int, n: int) -> int:
    d = abs(a - b) % n
    return min(d, n - d)


def find_minima(profile, window: int | None = None, min_prominence: float = 2.0,
                count: int = 4) -> MinimaSet:
    """Pick the ``count`` deepest well-separated minima of a distance profile.

    Minima are detected on the circularly smoothed profile and kept only if
    their prominence reaches ``min_prominence`` (pixels), which rejects
    digitization ripple. Each detection is then moved to the nearest-valued
    raw sample within ``window`` indices and walked down to a raw local
    minimum, so every returned index is a local minimum of the unsmoothed
    profile. The raw global minimum, being the nearest boundary point, is
    always a candidate. A minimum within ``window`` indices of a deeper one
    is suppressed.

    Raises :class:`InsufficientStructureError` when fewer than ``count``
    minima survive or the profile is too short for the window.
    """
    p = np.asarray(profile, dtype=np.float64)
    n = p.size
    if window is None:
        window = default_window(n)
    if window < 1:
        raise ValueError(f"window must be positive, got {window}")
    if n <= count * window:
        raise InsufficientStructureError(
            f"profile of {n} samples is too short for window {window}")
    s = smooth_profile(p, window)
    prev, nxt = np.roll(s, 1), np.roll(s, -1)
    detected = [int(i) for i in np.flatnonzero((s < prev) & (s <= nxt))
                if _prominence(s, int(i)) >= min_prominence]

    candidates = set()
    offsets = np.arange(-window, window + 1)
    for i in detected:
        idx = (i + offsets) % n
        k = _descend(p, int(idx[np.argmin(p[idx])]))
        if k is not None:
            candidates.add(k)
    g = _descend(p, int(np.argmin(p)))
    if g is not None:
        candidates.add(g)

    kept = []
    for k in sorted(candidates, key=lambda k: (p[k], k)):
        if all(_circular_gap(k, j, n) > window for j in kept):
            kept.append(k)
    if len(kept) < count:
        raise InsufficientStructureError(
            f"found {len(kept)} distinct profile minima, need {count}")
    kept = kept[:count]
    return MinimaSet(tuple(kept), tuple(float(p[k]) for k in kept))
