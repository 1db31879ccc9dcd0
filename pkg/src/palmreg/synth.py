"""Synthetic palm silhouettes with ground truth, plus brute-force oracles.

The hand is schematic: a disk palm, parallel capsule fingers and slot-shaped
valleys cut into the palm between adjacent fingers. In the canonical frame
the fingers point along ``+x`` from the palm center and the hand is mirror
symmetric about the finger axis (unless a thumb is added), so the middle
valley lies exactly on the ``+x`` ray from the shape center.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .classify import LineAnnotation, inclination, save_annotation
from .errors import SpecError
from .preprocess import LabelImage
from .raster import PixelCoord, as_mask, save_gray

HANDEDNESS = ("Right", "Left")


@dataclass(frozen=True)
class HandSpec:
    size: int = 440
    palm_radius: float = 150.0
    fingers: int = 4
    thumb: bool = False
    finger_length: float = 50.0
    finger_width: float = 34.0
    finger_gap: float = 12.0
    valley_depth: float = 20.0
    orientation: float = 0.0  # degrees, clockwise on screen
    handedness: str = "Right"
    noise_blobs: int = 3
    blob_radius: tuple = (2.0, 6.0)
    hand_level: int = 200
    background_level: int = 30
    jitter: float = 6.0
    seed: int = 0

    @property
    def center(self) -> tuple:
        c = float(self.size // 2)
        return c, c

    @property
    def pitch(self) -> float:
        return self.finger_width + self.finger_gap

    def finger_offsets(self) -> np.ndarray:
        return (np.arange(self.fingers) - (self.fingers - 1) / 2.0) * self.pitch

    def reach(self) -> float:
        """Largest distance of any hand pixel from the palm center."""
        r = self.palm_radius
        tips = [math.hypot(math.sqrt(max(r * r - v * v, 0.0)) + self.finger_length, v)
                for v in self.finger_offsets()]
        reach = max([r] + tips)
        if self.thumb:
            reach = max(reach, r + 0.6 * self.finger_length + 0.6 * self.finger_width)
        return reach

    def validate(self) -> None:
        if self.handedness not in HANDEDNESS:
            raise SpecError(f"handedness must be one of {HANDEDNESS}, got {self.handedness!r}")
        if self.fingers < 2:
            raise SpecError("need at least two fingers to form a valley")
        if min(self.palm_radius, self.finger_length, self.finger_width, self.finger_gap) <= 0:
            raise SpecError("palm radius and finger dimensions must be positive")
        if not 0 < self.valley_depth < self.palm_radius:
            raise SpecError("valley depth must lie strictly between 0 and the palm radius")
        span = self.fingers * self.finger_width + (self.fingers - 1) * self.finger_gap
        if span >= 1.8 * self.palm_radius:
            raise SpecError(f"fingers span {span:.1f} px, too wide for palm radius "
                            f"{self.palm_radius}")
        if self.reach() + 2 > self.size / 2:
            raise SpecError(f"hand reach {self.reach():.1f} px does not fit a "
                            f"{self.size} px canvas at every orientation")
        lo, hi = self.blob_radius
        if self.noise_blobs < 0 or not 0 < lo <= hi:
            raise SpecError("invalid noise blob settings")
        if not 0 <= self.background_level < self.hand_level <= 255:
            raise SpecError("hand must be brighter than the background")


@dataclass(frozen=True)
class GroundTruth:
    """What the generator knows about its output.

    ``annotation`` is in canonical-frame coordinates (the hand rendered at
    orientation 0 on the same canvas), which is the registered pose up to a
    translation; ``annotation_image`` holds the same endpoints in the
    generated image's own frame.
    """

    mask: np.ndarray
    valleys: tuple  # float (x, y) in image coordinates
    anchor_valley: tuple
    palm_center: tuple
    orientation: float
    annotation: LineAnnotation
    annotation_image: LineAnnotation
    handedness: str

    def to_json(self) -> dict:
        return {
            "valleys": [list(v) for v in self.valleys],
            "anchor_valley": list(self.anchor_valley),
            "palm_center": list(self.palm_center),
            "orientation": self.orientation,
            "handedness": self.handedness,
            "annotation": self.annotation.to_json(),
            "annotation_image": self.annotation_image.to_json(),
        }


def _capsule(u, v, a, b, radius):
    """Points within ``radius`` of segment a-b."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    t = ((u - ax) * dx + (v - ay) * dy) / (dx * dx + dy * dy)
    t = np.clip(t, 0.0, 1.0)
    return (u - ax - t * dx) ** 2 + (v - ay - t * dy) ** 2 <= radius * radius


def _to_image(spec: HandSpec, u, v):
    t = math.radians(spec.orientation)
    cx, cy = spec.center
    return cx + math.cos(t) * u - math.sin(t) * v, cy + math.sin(t) * u + math.cos(t) * v


def _valleys_canonical(spec: HandSpec):
    r = spec.palm_radius
    offs = spec.finger_offsets()
    out = []
    for a, b in zip(offs[:-1], offs[1:]):
        vg = (a + b) / 2.0
        out.append((math.sqrt(r * r - vg * vg) - spec.valley_depth, vg))
    return out


def render_mask(spec: HandSpec) -> np.ndarray:
    """Exact hand silhouette sampled at pixel centers."""
    n = spec.size
    cx, cy = spec.center
    yy, xx = np.mgrid[0:n, 0:n].astype(np.float64)
    t = math.radians(spec.orientation)
    # canonical coordinates: rotate image offsets by -orientation
    u = math.cos(t) * (xx - cx) + math.sin(t) * (yy - cy)
    v = -math.sin(t) * (xx - cx) + math.cos(t) * (yy - cy)
    r = spec.palm_radius
    palm = u * u + v * v <= r * r
    # V-shaped notch: apex at the valley point, opening to the finger gap at
    # the palm rim
    for xb, vg in _valleys_canonical(spec):
        slope = (spec.finger_gap / 2.0) / spec.valley_depth
        palm &= ~((u >= xb) & (np.abs(v - vg) <= (u - xb) * slope))
    hand = palm
    w2 = spec.finger_width / 2.0
    for vo in spec.finger_offsets():
        tip = math.sqrt(r * r - vo * vo) + spec.finger_length - w2
        hand |= _capsule(u, v, (0.0, vo), (tip, vo), w2)
    if spec.thumb:
        side = -1.0 if spec.handedness == "Right" else 1.0
        a = math.radians(110.0) * side
        length = r + 0.6 * spec.finger_length
        end = (math.cos(a) * length, math.sin(a) * length)
        hand |= _capsule(u, v, (0.0, 0.0), end, 0.6 * spec.finger_width)
    return hand.astype(np.uint8)


def _draw_annotation(spec: HandSpec, rng) -> LineAnnotation:
    sign = -1.0 if spec.handedness == "Right" else 1.0
    limit = 0.7 * (spec.palm_radius - spec.valley_depth)
    cx, cy = spec.center

    def segment(u_range):
        while True:
            mu = rng.uniform(*u_range) * limit
            mv = rng.uniform(-0.5, 0.5) * limit
            ang = math.radians(sign * rng.uniform(15.0, 60.0))
            half = rng.uniform(0.25, 0.45) * limit
            # screen direction with inclination `ang` (y up)
            du, dv = math.cos(ang) * half, -math.sin(ang) * half
            p = (round(cx + mu - du), round(cy + mv - dv))
            q = (round(cx + mu + du), round(cy + mv + dv))
            if all(math.hypot(x - cx, y - cy) <= limit for x, y in (p, q)):
                return p, q

    heart = segment((0.1, 0.6))
    life = segment((-0.6, 0.0))
    return LineAnnotation(heart=heart, life=life)


def _rotate_annotation(spec: HandSpec, ann: LineAnnotation) -> LineAnnotation:
    cx, cy = spec.center

    def move(pair):
        return tuple(tuple(round(c, 6) for c in _to_image(spec, p.x - cx, p.y - cy))
                     for p in pair)

    return LineAnnotation(heart=move(ann.heart) if ann.heart else None, life=move(ann.life))


def _add_blobs(spec: HandSpec, mask: np.ndarray, rng) -> np.ndarray:
    n = spec.size
    blobs = np.zeros_like(mask)
    yy, xx = np.mgrid[0:n, 0:n]
    placed = attempts = 0
    while placed < spec.noise_blobs:
        attempts += 1
        if attempts > 1000:
            raise SpecError("no room for the requested noise blobs")
        rad = rng.uniform(*spec.blob_radius)
        bx, by = rng.uniform(rad + 1, n - rad - 2, size=2)
        keep_out = rad + 4
        x0, x1 = int(max(bx - keep_out, 0)), int(min(bx + keep_out + 1, n))
        y0, y1 = int(max(by - keep_out, 0)), int(min(by + keep_out + 1, n))
        if mask[y0:y1, x0:x1].any():
            continue
        blobs |= ((xx - bx) ** 2 + (yy - by) ** 2 <= rad * rad).astype(np.uint8)
        placed += 1
    return blobs


def generate_hand(spec: HandSpec = HandSpec()):
    """Render a noisy gray hand image and return ``(image, GroundTruth)``."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    mask = render_mask(spec)
    blobs = _add_blobs(spec, mask, rng)
    img = np.where(mask | blobs, float(spec.hand_level), float(spec.background_level))
    img += rng.normal(0.0, spec.jitter, size=img.shape)
    img = np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)

    valleys = tuple(tuple(_to_image(spec, u, v)) for u, v in _valleys_canonical(spec))
    # with an even valley count the two central valleys tie; take the first
    anchor = valleys[(len(valleys) - 1) // 2]
    ann = _draw_annotation(spec, rng)
    truth = GroundTruth(
        mask=mask,
        valleys=valleys,
        anchor_valley=anchor,
        palm_center=spec.center,
        orientation=spec.orientation,
        annotation=ann,
        annotation_image=_rotate_annotation(spec, ann),
        handedness=spec.handedness,
    )
    return img, truth


def generate_disk(size: int = 200, radius: float = 60.0, seed: int = 0,
                  hand_level: int = 200, background_level: int = 30,
                  jitter: float = 6.0) -> np.ndarray:
    """A bright disk: a silhouette with no valleys at all."""
    rng = np.random.default_rng(seed)
    c = size // 2
    yy, xx = np.mgrid[0:size, 0:size]
    disk = (xx - c) ** 2 + (yy - c) ** 2 <= radius * radius
    img = np.where(disk, float(hand_level), float(background_level))
    img += rng.normal(0.0, jitter, size=img.shape)
    return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)


def digital_disk(shape, center, radius: float) -> np.ndarray:
    yy, xx = np.mgrid[0:shape[0], 0:shape[1]]
    return (((xx - center[0]) ** 2 + (yy - center[1]) ** 2) <= radius * radius).astype(np.uint8)


def flood_fill_label(mask) -> LabelImage:
    """Queue-based 8-connected flood fill, labels in raster discovery order."""
    mask = as_mask(mask)
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    count = 0
    for y in range(h):
        for x in range(w):
            if mask[y, x] and not labels[y, x]:
                count += 1
                labels[y, x] = count
                queue = deque([(x, y)])
                while queue:
                    px, py = queue.popleft()
                    for dy in (-1, 0, 1):
                        for dx in (-1, 0, 1):
                            nx, ny = px + dx, py + dy
                            if 0 <= nx < w and 0 <= ny < h and mask[ny, nx] and not labels[ny, nx]:
                                labels[ny, nx] = count
                                queue.append((nx, ny))
    return LabelImage(labels, count)


def brute_force_minima(profile) -> list:
    """Every circular index no greater than both neighbors and below one of them."""
    p = [float(v) for v in profile]
    n = len(p)
    out = []
    for i in range(n):
        left, right = p[i - 1], p[(i + 1) % n]
        if p[i] <= left and p[i] <= right and (p[i] < left or p[i] < right):
            out.append(i)
    return out


def corpus_specs(count: int, seed: int = 0, base: HandSpec = HandSpec()):
    """Deterministic variety of hand specs for a test corpus."""
    rng = np.random.default_rng(seed)
    specs = []
    for i in range(count):
        specs.append(replace(
            base,
            orientation=float(np.round(rng.uniform(-180.0, 180.0), 1)),
            handedness=HANDEDNESS[i % 2],
            seed=int(seed * 100003 + i),
        ))
    return specs


def emit_corpus(out_dir, count: int, seed: int = 0, base: HandSpec = HandSpec(),
                disks: int = 0) -> list:
    """Write ``hand_NNN.pgm`` + ``.truth.json`` + ``.lines.json`` triples.

    ``disks`` extra valley-free samples (``disk_NNN.pgm``, no sidecars) are
    appended for exercising the skip path. Returns the image paths written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, spec in enumerate(corpus_specs(count, seed, base)):
        img, truth = generate_hand(spec)
        stem = out / f"hand_{i:03d}"
        save_gray(img, stem.with_suffix(".pgm"))
        doc = truth.to_json()
        doc["spec"] = asdict(spec)
        with open(stem.with_suffix(".truth.json"), "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
        save_annotation(truth.annotation, stem.with_suffix(".lines.json"))
        paths.append(stem.with_suffix(".pgm"))
    for j in range(disks):
        path = out / f"disk_{j:03d}.pgm"
        save_gray(generate_disk(seed=seed * 7919 + j), path)
        paths.append(path)
    return paths


def annotation_signs(ann: LineAnnotation):
    heart = inclination(*ann.heart) if ann.heart else None
    return heart, inclination(*ann.life)


__all__ = [
    "GroundTruth", "HandSpec", "PixelCoord", "annotation_signs", "brute_force_minima",
    "corpus_specs", "digital_disk", "emit_corpus", "flood_fill_label", "generate_disk",
    "generate_hand", "render_mask",
]
