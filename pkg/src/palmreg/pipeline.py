"""Batch registration + classification and the rotation-invariance harness."""
from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import ndimage

from .classify import RULES, classify_sample, load_annotation
from .contour import region_centroid, smooth_profile
from .errors import ConfigError, PalmRegError
from .preprocess import KernelSpec, preprocess_sample
from .raster import load_gray, save_gray
from .register import RegistrationRecord, register_sample, rotate_image, wrap_degrees
from .synth import HandSpec, generate_hand

log = logging.getLogger(__name__)

CENTROID_MODES = ("boundary", "region")
REPORT_FIELDS = ("sample_id", "status", "x0", "y0", "theta_deg", "anchor_x", "anchor_y",
                 "theta1_deg", "theta2_deg", "palm_class")


@dataclass(frozen=True)
class PipelineConfig:
    sigma: float = 0.25
    kernel_size: int = 5
    window: int | None = None  # None: max(5, round(boundary length / 100))
    min_prominence: float = 2.0
    epsilon: float = 1.0
    reference_angle: float = 0.0
    rule: str = "twolevel"
    centroid: str = "boundary"
    output_dir: str | None = None
    annotations_dir: str | None = None
    emit_debug: bool = False
    jobs: int = 1

    def __post_init__(self):
        if not 0 < self.sigma <= 10:
            raise ConfigError(f"sigma must lie in (0, 10], got {self.sigma}")
        if self.kernel_size not in range(3, 32, 2):
            raise ConfigError(f"kernel size must be odd in [3, 31], got {self.kernel_size}")
        if self.window is not None and self.window < 1:
            raise ConfigError(f"smoothing window must be >= 1, got {self.window}")
        if self.min_prominence < 0:
            raise ConfigError("minimum prominence must be non-negative")
        if not 0 <= self.epsilon < 45:
            raise ConfigError(f"epsilon must lie in [0, 45) degrees, got {self.epsilon}")
        if not -180 < self.reference_angle <= 180:
            raise ConfigError("reference angle must lie in (-180, 180]")
        if self.rule not in RULES:
            raise ConfigError(f"rule must be one of {RULES}, got {self.rule!r}")
        if self.centroid not in CENTROID_MODES:
            raise ConfigError(f"centroid mode must be one of {CENTROID_MODES}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    @property
    def kernel(self) -> KernelSpec:
        return KernelSpec(self.kernel_size, self.sigma)


@dataclass(frozen=True)
class SampleReport:
    sample_id: str
    status: str
    x0: float | None = None
    y0: float | None = None
    theta_deg: float | None = None
    anchor_x: int | None = None
    anchor_y: int | None = None
    theta1_deg: float | None = None
    theta2_deg: float | None = None
    palm_class: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def row(self) -> list:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return f"{v:.4f}"
            return str(v)

        return [fmt(getattr(self, name)) for name in REPORT_FIELDS]


def sidecar_path(image_path, annotations_dir=None) -> Path:
    image_path = Path(image_path)
    folder = Path(annotations_dir) if annotations_dir else image_path.parent
    return folder / f"{image_path.stem}.lines.json"


def register_gray(img, cfg: PipelineConfig) -> RegistrationRecord:
    mask = preprocess_sample(img, cfg.kernel)
    return register_sample(img, mask, window=cfg.window, centroid_mode=cfg.centroid,
                           reference_deg=cfg.reference_angle,
                           min_prominence=cfg.min_prominence)


def process_sample(path, cfg: PipelineConfig) -> SampleReport:
    """Run one image through the whole pipeline; never raises for bad data."""
    sample_id = Path(path).stem
    try:
        img = load_gray(path)
        rec = register_gray(img, cfg)
    except PalmRegError as exc:
        log.info("%s skipped: %s", sample_id, exc)
        return SampleReport(sample_id, f"skipped:{exc.reason}")
    except OSError as exc:
        log.info("%s skipped: %s", sample_id, exc)
        return SampleReport(sample_id, "skipped:io-error")
    except Exception:  # a broken sample must not take the batch down
        log.exception("%s failed", sample_id)
        return SampleReport(sample_id, "skipped:internal-error")

    anchor = rec.anchor
    report = SampleReport(sample_id, "ok", rec.centroid.x0, rec.centroid.y0, rec.theta_deg,
                          anchor.x, anchor.y)
    if cfg.output_dir:
        out = Path(cfg.output_dir)
        save_gray(rec.registered, out / f"{sample_id}.registered.pgm")
        if cfg.emit_debug:
            write_debug(rec, img, out, sample_id)

    side = sidecar_path(path, cfg.annotations_dir)
    if side.exists():
        try:
            ann = load_annotation(side)
            h, w = rec.registered.shape
            ann.check_bounds(w, h)
            cls = classify_sample(ann, epsilon=cfg.epsilon, rule=cfg.rule)
        except (PalmRegError, OSError) as exc:
            log.info("%s annotation rejected: %s", sample_id, exc)
            return replace(report, status="skipped:bad-annotation")
        report = replace(report, theta1_deg=cls.theta1_deg, theta2_deg=cls.theta2_deg,
                         palm_class=cls.palm_class.value)
    return report


def run_pipeline(inputs, cfg: PipelineConfig) -> list:
    """Process every input; results come back in input order."""
    inputs = [os.fspath(p) for p in inputs]
    if not inputs:
        raise ConfigError("no input images given")
    if cfg.output_dir:
        Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
    if cfg.jobs == 1:
        reports = [process_sample(p, cfg) for p in inputs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(process_sample, inputs, [cfg] * len(inputs)))
    if cfg.output_dir:
        write_report(reports, Path(cfg.output_dir) / "report.csv")
    return reports


def format_report(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_FIELDS)
    for r in reports:
        writer.writerow(r.row())
    return buf.getvalue()


def write_report(reports, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_report(reports))


def _draw_line(canvas, p, q, value):
    n = int(max(abs(q[0] - p[0]), abs(q[1] - p[1]))) + 1
    xs = np.rint(np.linspace(p[0], q[0], n)).astype(int)
    ys = np.rint(np.linspace(p[1], q[1], n)).astype(int)
    ok = (xs >= 0) & (xs < canvas.shape[1]) & (ys >= 0) & (ys < canvas.shape[0])
    canvas[ys[ok], xs[ok]] = value


def _draw_box(canvas, x, y, half, value):
    h, w = canvas.shape
    canvas[max(y - half, 0):min(y + half + 1, h), max(x - half, 0):min(x + half + 1, w)] = value


def write_debug(rec: RegistrationRecord, img, out: Path, sample_id: str) -> None:
    """Boundary overlay, distance profile CSV and minima overlay."""
    path = rec.path
    boundary = (np.asarray(img) // 2).astype(np.uint8)
    boundary[path[:, 1], path[:, 0]] = 255
    save_gray(boundary, out / f"{sample_id}.boundary.pgm")

    smoothed = smooth_profile(rec.profile, rec.window)
    with open(out / f"{sample_id}.profile.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "x", "y", "distance", "smoothed"])
        for i, ((x, y), d, s) in enumerate(zip(path, rec.profile, smoothed)):
            writer.writerow([i, int(x), int(y), f"{d:.4f}", f"{s:.4f}"])

    overlay = boundary.copy()
    cx, cy = rec.centroid
    for i in rec.minima.indices:
        x, y = path[i]
        _draw_box(overlay, int(x), int(y), 2, 255)
    ax, ay = rec.anchor
    _draw_line(overlay, (cx, cy), (ax, ay), 255)
    ref = math.atan2(ay - cy, ax - cx) - math.radians(rec.theta_deg)
    length = float(rec.profile.max())
    _draw_line(overlay, (cx, cy), (cx + length * math.cos(ref), cy + length * math.sin(ref)), 160)
    _draw_box(overlay, int(round(cx)), int(round(cy)), 3, 255)
    save_gray(overlay, out / f"{sample_id}.minima.pgm")


def aligned_iou(mask_a, center_a, mask_b, center_b) -> float:
    """IoU of two masks after translating ``b`` so its center meets ``a``'s.

    The sub-pixel part of the shift is handled by bilinear resampling of
    ``b`` thresholded at one half.
    """
    a = np.asarray(mask_a, dtype=np.float64)
    b = np.asarray(mask_b, dtype=np.float64)
    dx = center_b[0] - center_a[0]
    dy = center_b[1] - center_a[1]
    # common frame expressed in a's coordinates
    x_lo = math.floor(min(0.0, -dx)) - 1
    y_lo = math.floor(min(0.0, -dy)) - 1
    x_hi = math.ceil(max(a.shape[1] - 1, b.shape[1] - 1 - dx)) + 1
    y_hi = math.ceil(max(a.shape[0] - 1, b.shape[0] - 1 - dy)) + 1
    yy, xx = np.mgrid[y_lo:y_hi + 1, x_lo:x_hi + 1].astype(np.float64)
    sa = ndimage.map_coordinates(a, [yy, xx], order=0, cval=0.0) > 0.5
    sb = ndimage.map_coordinates(b, [yy + dy, xx + dx], order=1, cval=0.0) >= 0.5
    union = np.count_nonzero(sa | sb)
    if union == 0:
        return 1.0
    return np.count_nonzero(sa & sb) / union


@dataclass
class HarnessReport:
    angles: list
    thetas: list
    errors: list  # recovered rotation minus applied rotation, degrees
    statuses: list
    iou: np.ndarray = field(repr=False)

    @property
    def min_iou(self) -> float:
        vals = self.iou[np.triu_indices(len(self.angles), 1)]
        vals = vals[~np.isnan(vals)]
        return float(vals.min()) if vals.size else float("nan")

    @property
    def max_error(self) -> float:
        errs = [abs(e) for e in self.errors if e is not None]
        return max(errs) if errs else float("nan")

    def passes(self, min_iou: float = 0.95, max_error: float = 2.0) -> bool:
        return (all(s == "ok" for s in self.statuses)
                and self.min_iou >= min_iou and self.max_error <= max_error)

    def to_json(self) -> dict:
        n = len(self.angles)
        return {
            "angles": self.angles,
            "theta_deg": self.thetas,
            "theta_error_deg": self.errors,
            "status": self.statuses,
            "iou": [[None if np.isnan(self.iou[i, j]) else round(float(self.iou[i, j]), 6)
                     for j in range(n)] for i in range(n)],
            "min_iou": self.min_iou,
            "max_error_deg": self.max_error,
        }


def rotation_harness(spec: HandSpec, angles, cfg: PipelineConfig = PipelineConfig()) -> HarnessReport:
    """Register rotated copies of one synthetic hand and compare the results.

    Copies are produced by rotating the rendered image about its center,
    with exposed canvas filled at the background level. The first angle is
    the baseline for the recovered-rotation errors.
    """
    angles = [float(a) for a in angles]
    if not angles:
        raise ConfigError("the rotation harness needs at least one angle")
    img, _ = generate_hand(spec)
    center = ((img.shape[1] - 1) / 2.0, (img.shape[0] - 1) / 2.0)
    records = []
    statuses = []
    for phi in angles:
        copy = rotate_image(img, center, -phi, fill=spec.background_level)
        try:
            records.append(register_gray(copy, cfg))
            statuses.append("ok")
        except PalmRegError as exc:
            records.append(None)
            statuses.append(f"skipped:{exc.reason}")

    thetas = [r.theta_deg if r else None for r in records]
    base = next((i for i, r in enumerate(records) if r), None)
    errors = []
    for phi, th in zip(angles, thetas):
        if th is None or base is None:
            errors.append(None)
        else:
            errors.append(wrap_degrees(th - thetas[base] - (phi - angles[base])))

    # the area centroid, unlike the boundary-point mean, does not depend on
    # how densely the digitized outline samples each edge direction
    centers = [region_centroid(r.registered_mask) if r else None for r in records]
    n = len(angles)
    iou = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(i, n):
            if records[i] and records[j]:
                iou[i, j] = iou[j, i] = aligned_iou(
                    records[i].registered_mask, centers[i],
                    records[j].registered_mask, centers[j])
    return HarnessReport(angles, thetas, errors, statuses, iou)
