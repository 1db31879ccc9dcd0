"""Classify palms as left or right from heart-line and life-line inclinations.

Run:  python demos/04_classify.py
"""
from palmreg.classify import LineAnnotation, classify_sample, mirror_annotation
from palmreg.synth import corpus_specs, generate_hand

for spec in corpus_specs(6, seed=4):
    _, truth = generate_hand(spec)
    rec = classify_sample(truth.annotation)
    flipped = classify_sample(mirror_annotation(truth.annotation, spec.size))
    print(f"{spec.handedness:5s} hand: theta1 {rec.theta1_deg:7.2f}  theta2 {rec.theta2_deg:7.2f}"
          f"  -> {rec.palm_class.value:5s} ({rec.rule_path}); mirrored -> {flipped.palm_class.value}")

# Mixed signs: the two-level rule defers to the life line; the bare rule says LEFT.
mixed = LineAnnotation(heart=((10, 50), (60, 30)), life=((10, 50), (60, 70)))
for rule in ("twolevel", "algorithm1"):
    rec = classify_sample(mixed, rule=rule)
    print(f"mixed-sign sample, rule {rule:10s}: {rec.palm_class.value} via {rec.rule_path}")

# A missing heart line still classifies from the life line alone.
no_heart = LineAnnotation(heart=None, life=((10, 50), (60, 80)))
print("heart line absent:", classify_sample(no_heart).palm_class.value)
