"""Smoothing, mean-threshold binarization and largest-object retention."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import as_gray, as_mask

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class KernelSpec:
    """Square Gaussian smoothing mask. ``size`` is odd, ``sigma`` in pixels."""

    size: int = 5
    sigma: float = 0.25

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 3 or self.size % 2 == 0:
            raise ValueError(f"kernel size must be an odd integer >= 3, got {self.size}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class LabelImage:
    labels: np.ndarray  # int32, 0 = background
    count: int

    def areas(self) -> np.ndarray:
        """Pixel count per label; index 0 is the background."""
        return np.bincount(self.labels.ravel(), minlength=self.count + 1)


def gaussian_kernel(spec: KernelSpec) -> np.ndarray:
    half = spec.size // 2
    offsets = np.arange(-half, half + 1, dtype=np.float64)
    xx, yy = np.meshgrid(offsets, offsets)
    w = np.exp(-(xx ** 2 + yy ** 2) / (2.0 * spec.sigma ** 2))
    return w / w.sum()


def filter_image(img, spec: KernelSpec) -> np.ndarray:
    """Convolve with the Gaussian mask, replicating edge pixels.

    The result is rounded half-up and clamped back into uint8.
    """
    img = as_gray(img)
    kernel = gaussian_kernel(spec)
    half = spec.size // 2
    h, w = img.shape
    padded = np.pad(img.astype(np.float64), half, mode="edge")
    acc = np.zeros((h, w), dtype=np.float64)
    # kernel is symmetric, so correlation and convolution coincide
    for dy in range(spec.size):
        for dx in range(spec.size):
            acc += kernel[dy, dx] * padded[dy:dy + h, dx:dx + w]
    return np.clip(np.floor(acc + 0.5), 0, 255).astype(np.uint8)


def mean_intensity(img) -> float:
    img = as_gray(img)
    return float(img.sum(dtype=np.int64)) / img.size


def binarize(img, threshold: float) -> np.ndarray:
    """1 where the pixel is strictly above ``threshold``; ties go to background."""
    return (np.asarray(img) > threshold).astype(np.uint8)


def label_components(mask) -> LabelImage:
    """8-connected labeling, labels numbered in first-encounter raster order."""
    mask = as_mask(mask)
    raw, count = ndimage.label(mask, structure=_EIGHT)
    if count == 0:
        return LabelImage(raw.astype(np.int32), 0)
    # renumber by the raster position of each component's first pixel
    flat = raw.ravel()
    nz = np.flatnonzero(flat)
    first_labels = flat[nz]
    _, first_pos = np.unique(first_labels, return_index=True)
    order = np.argsort(first_pos, kind="stable")
    remap = np.zeros(count + 1, dtype=np.int32)
    remap[order + 1] = np.arange(1, count + 1, dtype=np.int32)
    return LabelImage(remap[raw], int(count))


def keep_largest(labels: LabelImage) -> np.ndarray:
    """Mask of the component with the most pixels (lowest label on ties)."""
    if labels.count == 0:
        return np.zeros_like(labels.labels, dtype=np.uint8)
    areas = labels.areas()
    areas[0] = -1
    best = int(np.argmax(areas))  # argmax returns the first, i.e. lowest, label
    return (labels.labels == best).astype(np.uint8)


def preprocess_sample(img, spec: KernelSpec = KernelSpec()) -> np.ndarray:
    """Smooth, threshold at the filtered mean and keep the largest object.

    A constant image has no pixel above its mean and yields an empty mask.
    """
    smoothed = filter_image(img, spec)
    binary = binarize(smoothed, mean_intensity(smoothed))
    return keep_largest(label_components(binary))
