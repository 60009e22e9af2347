"""Command-line front end: ``spoofaug <command> ...``.

Exit status is 0 on success, 1 when files failed or evaluation input was
bad, and 2 for configuration or usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys

from . import __version__
from .audio_io import read_wav
from .codec import CodecSpec, check_encoder, set_subprocess_limit
from .config import config_from_dict, tomllib
from .errors import ConfigError, SpoofAugError
from .metrics import (
    EvaluationBundle,
    GroupBy,
    compute_eer,
    fuse_score_sets,
    load_scores,
    pooled_eer,
    save_scores,
    write_report,
)
from .pipeline import run_augment_pipeline
from .stft import StftConfig, compute_stft, write_magnitude_csv

EXIT_OK, EXIT_FAILURES, EXIT_USAGE = 0, 1, 2


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}%"


def _load_pipeline(path: str, mode: str, emit_provenance: bool, parallelism: int | None):
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    doc.setdefault("mode", mode)
    if doc["mode"] != mode:
        raise ConfigError(f"config declares mode {doc['mode']!r} but command expects {mode!r}")
    config = config_from_dict(doc, os.path.dirname(os.path.abspath(path)))
    changes = {}
    if emit_provenance:
        changes["emit_provenance"] = True
    if parallelism is not None:
        changes["parallelism"] = parallelism
    return dataclasses.replace(config, **changes) if changes else config


def cmd_pipeline(args, mode: str) -> int:
    try:
        config = _load_pipeline(args.config, mode, args.emit_provenance, args.parallelism)
    except (OSError, ConfigError, tomllib.TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    set_subprocess_limit(config.parallelism)
    try:
        summary = run_augment_pipeline(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"processed {summary.processed} files: {summary.succeeded} ok, {summary.failed} failed")
    print(f"manifest: {summary.manifest_path}")
    return summary.exit_code


def cmd_eer(args) -> int:
    result = compute_eer(load_scores(args.scores))
    print(f"EER: {_pct(result.eer)}")
    print(f"threshold: {result.threshold:.6g}")
    return EXIT_OK


def cmd_fuse(args) -> int:
    sets = [load_scores(p) for p in args.scores]
    fused = fuse_score_sets(sets, args.weights)
    save_scores(fused, args.output)
    print(f"fused {len(sets)} score sets into {args.output}")
    return EXIT_OK


def cmd_pooled(args) -> int:
    table = pooled_eer(load_scores(args.scores), args.by)
    print(f"{args.by}\tEER")
    for tag, res in table.items():
        print(f"{tag}\t{_pct(res.eer) if res is not None else 'undefined'}")
    return EXIT_OK


def cmd_report(args) -> int:
    sets = [load_scores(p) for p in args.scores]
    if len(sets) > 1 or args.weights:
        scores = fuse_score_sets(sets, args.weights)
        weights = args.weights or [1.0] * len(sets)
        fusion = {"inputs": list(args.scores), "weights": weights, "method": "minmax_weighted_mean"}
    else:
        scores, fusion = sets[0], None
    overall = compute_eer(scores)
    tables = {}
    for group in GroupBy:
        if any(getattr(r, group.value) is not None for r in scores.records):
            tables[group] = pooled_eer(scores, group)
    bundle = EvaluationBundle(
        overall=overall,
        pooled_by_attack=tables.get(GroupBy.ATTACK),
        pooled_by_codec=tables.get(GroupBy.CODEC),
        fusion=fusion,
        provenance={"toolkit": "spoofaug", "version": __version__, "seed": args.seed,
                    "n_records": len(scores)},
    )
    write_report(bundle, args.output)
    print(f"EER: {_pct(overall.eer)}")
    print(f"report: {args.output}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    audio = read_wav(args.wav)
    spec = compute_stft(audio, StftConfig(args.frame_size, args.hop, args.window))
    write_magnitude_csv(spec, args.stft_csv)
    m, k = spec.shape
    print(f"{args.wav}: {len(audio)} samples at {audio.sample_rate} Hz -> {m} frames x {k} bins")
    return EXIT_OK


def cmd_check_encoder(args) -> int:
    status = check_encoder(CodecSpec(args.codec))
    print(("available: " if status.available else "unavailable: ") + status.detail)
    return EXIT_OK if status.available else EXIT_FAILURES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spoofaug", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, mode, help_text in (
        ("augment", "audio", "augment a WAV corpus (codec, LPF, MaskedSpec)"),
        ("features", "features", "augment feature matrices (MaskedFeature, normalisation)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        p.add_argument("--emit-provenance", action="store_true",
                       help="record mask plans in the manifest and next to each output")
        p.add_argument("--parallelism", type=int, default=None)
        p.set_defaults(func=lambda a, m=mode: cmd_pipeline(a, m))

    p = sub.add_parser("eer", help="equal error rate of a score file")
    p.add_argument("scores")
    p.set_defaults(func=cmd_eer)

    p = sub.add_parser("fuse", help="fuse score files by normalised weighted mean")
    p.add_argument("scores", nargs="+")
    p.add_argument("--weights", type=float, nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("pooled", help="pooled EER per attack or codec")
    p.add_argument("scores")
    p.add_argument("--by", choices=[g.value for g in GroupBy], required=True)
    p.set_defaults(func=cmd_pooled)

    p = sub.add_parser("report", help="JSON report with overall, pooled and fusion results")
    p.add_argument("scores", nargs="+")
    p.add_argument("--weights", type=float, nargs="+")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("inspect", help="export STFT magnitudes of a WAV file as CSV")
    p.add_argument("wav")
    p.add_argument("--stft-csv", required=True)
    p.add_argument("--frame-size", type=int, default=512)
    p.add_argument("--hop", type=int, default=256)
    p.add_argument("--window", choices=["hann", "rectangular"], default="hann")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("check-encoder", help="probe the external transcoder")
    p.add_argument("--codec", choices=["mp3", "m4a", "passthrough"], default="mp3")
    p.set_defaults(func=cmd_check_encoder)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpoofAugError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURES


if __name__ == "__main__":
    sys.exit(main())
