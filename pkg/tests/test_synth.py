import math
from dataclasses import replace

import numpy as np
import pytest

from palmreg.classify import PalmClass, classify_sample, inclination
from palmreg.errors import SpecError
from palmreg.synth import (
    HandSpec,
    brute_force_minima,
    corpus_specs,
    flood_fill_label,
    generate_hand,
    render_mask,
)


def test_determinism():
    a_img, a_truth = generate_hand(HandSpec(seed=9, orientation=33))
    b_img, b_truth = generate_hand(HandSpec(seed=9, orientation=33))
    assert np.array_equal(a_img, b_img)
    assert a_truth.to_json() == b_truth.to_json()
    c_img, _ = generate_hand(HandSpec(seed=10, orientation=33))
    assert not np.array_equal(a_img, c_img)


@pytest.mark.parametrize("hand", ["Right", "Left"])
def test_annotation_signs(hand):
    for seed in range(10):
        _, truth = generate_hand(HandSpec(handedness=hand, seed=seed))
        t1 = inclination(*truth.annotation.heart)
        t2 = inclination(*truth.annotation.life)
        if hand == "Right":
            assert t1 < -1.0 and t2 < -1.0
        else:
            assert t1 > 1.0 and t2 > 1.0
        expected = PalmClass.RIGHT if hand == "Right" else PalmClass.LEFT
        assert classify_sample(truth.annotation).palm_class is expected


def test_annotation_inside_mask():
    for seed, phi in [(0, 0.0), (1, 37.0), (2, -120.0)]:
        _, truth = generate_hand(HandSpec(seed=seed, orientation=phi))
        for p in truth.annotation_image.points():
            assert truth.mask[int(round(p.y)), int(round(p.x))] == 1


def test_valleys_rotate_with_orientation():
    spec = HandSpec()
    _, upright = generate_hand(spec)
    _, turned = generate_hand(replace(spec, orientation=30.0))
    cx, cy = spec.center
    t = math.radians(30.0)
    for (x, y), (tx, ty) in zip(upright.valleys, turned.valleys):
        rx = cx + math.cos(t) * (x - cx) - math.sin(t) * (y - cy)
        ry = cy + math.sin(t) * (x - cx) + math.cos(t) * (y - cy)
        assert math.hypot(rx - tx, ry - ty) <= 1.5


def test_valleys_lie_on_mask_edge():
    _, truth = generate_hand(HandSpec(orientation=12.0))
    for x, y in truth.valleys:
        x, y = int(round(x)), int(round(y))
        window = truth.mask[y - 2:y + 3, x - 2:x + 3]
        assert window.any() and not window.all()


def test_mask_single_component_and_blobs_smaller():
    spec = HandSpec(noise_blobs=6, seed=5)
    img, truth = generate_hand(spec)
    assert flood_fill_label(truth.mask).count == 1
    bright = (img > (spec.hand_level + spec.background_level) / 2).astype(np.uint8)
    labels = flood_fill_label(bright)
    assert labels.count == 7
    areas = sorted(np.bincount(labels.labels.ravel())[1:])
    assert areas[-1] == truth.mask.sum()
    assert areas[-2] < areas[-1]


def test_thumb_changes_silhouette():
    plain = render_mask(HandSpec())
    right = render_mask(HandSpec(thumb=True))
    left = render_mask(HandSpec(thumb=True, handedness="Left"))
    assert right.sum() > plain.sum()
    assert not np.array_equal(right, left)
    # left and right hands mirror each other across the finger axis (row 220)
    assert np.array_equal(left[1:], right[1:][::-1])


@pytest.mark.parametrize("bad", [
    dict(valley_depth=200.0),
    dict(valley_depth=0.0),
    dict(size=300),
    dict(fingers=1),
    dict(handedness="Both"),
    dict(fingers=8),
    dict(hand_level=20),
])
def test_invalid_specs(bad):
    with pytest.raises(SpecError):
        generate_hand(replace(HandSpec(), **bad))


def test_flood_fill_examples():
    assert flood_fill_label(np.array([[1, 0], [0, 1]])).count == 1
    assert flood_fill_label(np.zeros((3, 3), dtype=np.uint8)).count == 0


def test_brute_force_minima_examples():
    assert brute_force_minima([3, 1, 3, 1, 3, 1, 3, 1]) == [1, 3, 5, 7]
    assert brute_force_minima([5, 4, 3, 2, 1, 2, 3, 4]) == [4]
    assert brute_force_minima([2.0] * 9) == []


def test_corpus_specs_alternate_handedness():
    specs = corpus_specs(6, seed=3)
    assert [s.handedness for s in specs] == ["Right", "Left"] * 3
    assert len({s.seed for s in specs}) == 6
    assert corpus_specs(6, seed=3) == specs
