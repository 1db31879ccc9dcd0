"""Trace the silhouette outline and find the finger valleys in its distance profile.

Run:  python demos/02_boundary_profile.py
"""
import numpy as np

from palmreg.contour import (
    centroid_of, default_window, distance_profile, find_minima, smooth_profile, trace_boundary,
)
from palmreg.errors import InsufficientStructureError
from palmreg.preprocess import preprocess_sample
from palmreg.synth import HandSpec, generate_disk, generate_hand

img, truth = generate_hand(HandSpec(orientation=30.0, seed=2))
mask = preprocess_sample(img)
path = trace_boundary(mask)
c = centroid_of(path)
profile = distance_profile(path, c)
window = default_window(len(path))
print(f"boundary: {len(path)} points, centroid ({c.x0:.2f}, {c.y0:.2f}), window {window}")

minima = find_minima(profile, window)
for i, v in zip(minima.indices, minima.values):
    x, y = path[i]
    print(f"  valley at index {i:4d}  ({x:3d}, {y:3d})  distance {v:6.2f}")
print("ground-truth valleys:", [tuple(round(a) for a in v) for v in truth.valleys])

# A coarse text plot of the smoothed profile, one row per 1/60 of the outline.
s = smooth_profile(profile, window)
lo, hi = s.min(), s.max()
for k in range(0, len(s), max(1, len(s) // 60)):
    bar = int(50 * (s[k] - lo) / (hi - lo))
    mark = " <" if any(abs(k - i) < len(s) // 120 + 1 for i in minima.indices) else ""
    print(f"{k:5d} {'#' * bar}{mark}")

# A plain disk has no valleys, which is reported rather than guessed at.
disk = preprocess_sample(generate_disk())
dpath = trace_boundary(disk)
try:
    find_minima(distance_profile(dpath, centroid_of(dpath)))
except InsufficientStructureError as exc:
    print(f"disk: {exc}")
