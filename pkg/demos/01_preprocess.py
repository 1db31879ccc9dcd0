"""Walk one synthetic hand through filtering, thresholding and labeling.

Run:  python demos/01_preprocess.py [out_dir]
"""
import sys
from pathlib import Path

import numpy as np

from palmreg.preprocess import (
    KernelSpec, binarize, filter_image, gaussian_kernel, keep_largest, label_components,
    mean_intensity,
)
from palmreg.raster import binary_to_gray, save_gray
from palmreg.synth import HandSpec, generate_hand

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

# A hand with a few stray blobs, so the labeling step has something to discard.
img, truth = generate_hand(HandSpec(noise_blobs=5, seed=11))
save_gray(img, out / "01_input.pgm")

spec = KernelSpec()
print(f"kernel {spec.size}x{spec.size}, sigma={spec.sigma}")
print(np.array2string(gaussian_kernel(spec), precision=5, suppress_small=True))

smooth = filter_image(img, spec)
t = mean_intensity(smooth)
binary = binarize(smooth, t)
print(f"threshold (mean of filtered image) = {t:.2f}; object pixels = {int(binary.sum())}")

labels = label_components(binary)
print(f"{labels.count} components, areas: {labels.areas()[1:].tolist()}")
mask = keep_largest(labels)
save_gray(binary_to_gray(mask), out / "01_mask.pgm")

agree = np.count_nonzero(mask == truth.mask) / mask.size
print(f"pixel agreement with the ground-truth silhouette: {agree:.4f}")
print(f"wrote {out}/01_input.pgm and {out}/01_mask.pgm")
