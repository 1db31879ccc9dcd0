"""Left/right palm decision from heart-line and life-line endpoint inclinations.

Inclinations use the mathematical convention (y up) even though image rows
grow downward: a segment rising to the right on screen has a positive
inclination. Both lines negative means a right palm, both positive a left
palm.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

from .errors import AnnotationError
from .raster import PixelCoord

DEFAULT_EPSILON = 1.0
RULES = ("twolevel", "algorithm1")


class PalmClass(str, Enum):
    LEFT = "LEFT"
    RIGHT = "RIGHT"
    INDETERMINATE = "INDET"


@dataclass(frozen=True)
class LineAnnotation:
    """Endpoints in registered-image coordinates; ``heart`` may be absent."""

    heart: tuple | None  # (P1, P2)
    life: tuple  # (Q1, Q2)

    def __post_init__(self):
        life = _pair(self.life, "life")
        object.__setattr__(self, "life", life)
        if life[0] == life[1]:
            raise AnnotationError("life: start and end points coincide")
        if self.heart is not None:
            heart = _pair(self.heart, "heart")
            object.__setattr__(self, "heart", heart)
            if heart[0] == heart[1]:
                raise AnnotationError("heart: start and end points coincide")

    @property
    def heart_present(self) -> bool:
        return self.heart is not None

    def points(self):
        return (self.heart or ()) + self.life

    def check_bounds(self, width: int, height: int) -> None:
        for name, pts in (("heart", self.heart), ("life", self.life)):
            for p in pts or ():
                if not (0 <= p.x < width and 0 <= p.y < height):
                    raise AnnotationError(
                        f"{name}: point ({p.x}, {p.y}) outside the {width}x{height} image")

    def to_json(self) -> dict:
        def enc(pair):
            return [[_num(p.x), _num(p.y)] for p in pair]

        return {"heart": enc(self.heart) if self.heart else None, "life": enc(self.life)}

    @classmethod
    def from_json(cls, doc) -> "LineAnnotation":
        if not isinstance(doc, dict) or "life" not in doc:
            raise AnnotationError("annotation must be an object with a 'life' field")
        return cls(heart=doc.get("heart"), life=doc["life"])


def _num(v):
    return int(v) if float(v).is_integer() else float(v)


def _pair(value, name):
    try:
        a, b = value
        pts = tuple(PixelCoord(*(_coerce(v, name) for v in p)) for p in (a, b))
    except AnnotationError:
        raise
    except (TypeError, ValueError):
        raise AnnotationError(f"{name}: expected two [x, y] points, got {value!r}") from None
    return pts


def _coerce(v, name):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise AnnotationError(f"{name}: coordinate {v!r} is not a finite number")
    return v


def load_annotation(path) -> LineAnnotation:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AnnotationError(f"{path}: invalid JSON ({exc})") from None
    try:
        return LineAnnotation.from_json(doc)
    except AnnotationError as exc:
        raise AnnotationError(f"{path}: {exc}") from None


def save_annotation(ann: LineAnnotation, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ann.to_json(), fh)
        fh.write("\n")


@dataclass(frozen=True)
class ClassificationRecord:
    theta1_deg: float | None
    theta2_deg: float
    palm_class: PalmClass
    rule_path: str


def inclination(start, end) -> float:
    """Inclination of the line through start and end, y axis pointing up.

    This is the arctangent of the gradient, in (-90, 90]; for a segment
    drawn left to right it equals atan2(start.y - end.y, end.x - start.x).
    A left-right mirror image has exactly the opposite inclination.
    """
    if start[0] == end[0] and start[1] == end[1]:
        raise AnnotationError("inclination of a zero-length segment is undefined")
    dx = end[0] - start[0]
    dy_up = start[1] - end[1]
    if dx < 0 or (dx == 0 and dy_up < 0):
        dx, dy_up = -dx, -dy_up
    return math.degrees(math.atan2(dy_up, dx))


def classify_sample(ann: LineAnnotation, *, epsilon: float = DEFAULT_EPSILON,
                    rule: str = "twolevel") -> ClassificationRecord:
    """Two-level sign test on heart line (theta1) and life line (theta2).

    ``twolevel``: both below ``-epsilon`` is RIGHT, both above ``+epsilon`` is
    LEFT; otherwise the life line decides alone, and a life line within the
    dead band is INDET. ``algorithm1``: RIGHT only when both are below
    ``-epsilon``, LEFT in every other case.
    """
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")
    theta1 = inclination(*ann.heart) if ann.heart_present else None
    theta2 = inclination(*ann.life)
    angles = [t for t in (theta1, theta2) if t is not None]

    if rule == "algorithm1":
        if all(t < -epsilon for t in angles):
            return ClassificationRecord(theta1, theta2, PalmClass.RIGHT, "algorithm1-right")
        return ClassificationRecord(theta1, theta2, PalmClass.LEFT, "algorithm1-else-left")

    if theta1 is not None:
        if theta1 < -epsilon and theta2 < -epsilon:
            return ClassificationRecord(theta1, theta2, PalmClass.RIGHT, "both-negative")
        if theta1 > epsilon and theta2 > epsilon:
            return ClassificationRecord(theta1, theta2, PalmClass.LEFT, "both-positive")
    if theta2 < -epsilon:
        return ClassificationRecord(theta1, theta2, PalmClass.RIGHT, "life-line")
    if theta2 > epsilon:
        return ClassificationRecord(theta1, theta2, PalmClass.LEFT, "life-line")
    return ClassificationRecord(theta1, theta2, PalmClass.INDETERMINATE, "life-line-flat")


def mirror_annotation(ann: LineAnnotation, image_width: int) -> LineAnnotation:
    """Reflect left-right (x -> width - 1 - x), keeping endpoint order."""

    def flip(pair):
        return tuple((image_width - 1 - p.x, p.y) for p in pair)

    return LineAnnotation(heart=flip(ann.heart) if ann.heart else None, life=flip(ann.life))
