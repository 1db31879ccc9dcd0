"""Command line entry point: ``palmreg {register,synth,harness,classify}``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace

from .classify import RULES, classify_sample, load_annotation
from .errors import ConfigError, PalmRegError
from .pipeline import CENTROID_MODES, PipelineConfig, format_report, rotation_harness, run_pipeline
from .synth import HandSpec, emit_corpus

DEFAULT_ANGLES = "0,15,30,45,60,90,135"


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("pipeline")
    g.add_argument("--sigma", type=float, default=0.25, help="Gaussian sigma in pixels")
    g.add_argument("--kernel-size", type=int, default=5, help="odd Gaussian mask size")
    g.add_argument("--window", type=int, default=None,
                   help="profile smoothing window (default: max(5, boundary length / 100))")
    g.add_argument("--min-prominence", type=float, default=2.0,
                   help="minimum depth of a profile minimum, pixels")
    g.add_argument("--epsilon", type=float, default=1.0, help="sign dead band, degrees")
    g.add_argument("--reference-angle", type=float, default=0.0,
                   help="direction of the canonical anchor ray, degrees")
    g.add_argument("--rule", choices=RULES, default="twolevel")
    g.add_argument("--centroid", choices=CENTROID_MODES, default="boundary")


def _config(args, **extra) -> PipelineConfig:
    return PipelineConfig(
        sigma=args.sigma, kernel_size=args.kernel_size, window=args.window,
        min_prominence=args.min_prominence, epsilon=args.epsilon,
        reference_angle=args.reference_angle, rule=args.rule, centroid=args.centroid,
        **extra)


def _cmd_register(args) -> int:
    cfg = _config(args, output_dir=args.out, annotations_dir=args.annotations_dir,
                  emit_debug=args.emit_debug, jobs=args.jobs)
    reports = run_pipeline(args.inputs, cfg)
    sys.stdout.write(format_report(reports))
    skipped = sum(not r.ok for r in reports)
    if skipped:
        logging.getLogger(__name__).warning("%d of %d samples skipped", skipped, len(reports))
    return 1 if (args.strict and skipped) else 0


def _cmd_synth(args) -> int:
    base = replace(HandSpec(), thumb=args.thumb, noise_blobs=args.noise_blobs)
    paths = emit_corpus(args.out, args.count, seed=args.seed, base=base, disks=args.disks)
    for p in paths:
        print(p)
    return 0


def _cmd_harness(args) -> int:
    try:
        angles = [float(a) for a in args.angles.split(",") if a.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse angle list {args.angles!r}") from None
    spec = replace(HandSpec(), seed=args.seed, handedness=args.handedness)
    report = rotation_harness(spec, angles, _config(args))
    json.dump(report.to_json(), sys.stdout, indent=1)
    sys.stdout.write("\n")
    ok = report.passes(args.min_iou, args.max_error)
    return 1 if (args.strict and not ok) else 0


def _cmd_classify(args) -> int:
    cfg = _config(args)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["annotation", "theta1_deg", "theta2_deg", "palm_class", "rule_path"])
    failed = 0
    for path in args.annotations:
        try:
            rec = classify_sample(load_annotation(path), epsilon=cfg.epsilon, rule=cfg.rule)
        except (PalmRegError, OSError) as exc:
            logging.getLogger(__name__).error("%s", exc)
            writer.writerow([path, "", "", "", "error"])
            failed += 1
            continue
        t1 = "" if rec.theta1_deg is None else f"{rec.theta1_deg:.4f}"
        writer.writerow([path, t1, f"{rec.theta2_deg:.4f}", rec.palm_class.value, rec.rule_path])
    return 1 if (args.strict and failed) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="palmreg", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("register", help="register (and classify) a batch of images")
    p.add_argument("inputs", nargs="+", help="PGM or PNG images")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--annotations-dir", help="where <stem>.lines.json sidecars live "
                                             "(default: next to each image)")
    p.add_argument("--emit-debug", action="store_true",
                   help="write boundary/minima overlays and profile CSVs")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--strict", action="store_true", help="exit 1 if any sample is skipped")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_register)

    p = sub.add_parser("synth", help="emit a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--disks", type=int, default=0, help="extra valley-free disk samples")
    p.add_argument("--thumb", action="store_true")
    p.add_argument("--noise-blobs", type=int, default=3)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("harness", help="rotation-invariance measurement")
    p.add_argument("--angles", default=DEFAULT_ANGLES, help="comma separated degrees")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--handedness", choices=("Right", "Left"), default="Right")
    p.add_argument("--min-iou", type=float, default=0.95)
    p.add_argument("--max-error", type=float, default=2.0)
    p.add_argument("--strict", action="store_true", help="exit 1 if the thresholds are missed")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_harness)

    p = sub.add_parser("classify", help="classify annotation files only")
    p.add_argument("annotations", nargs="+")
    p.add_argument("--strict", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_classify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"palmreg: configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
