"""Batch augmentation over a corpus with per-file deterministic seeding."""

from __future__ import annotations

import json
import logging
import os
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .audio_io import read_wav, write_wav
from .codec import codec_roundtrip_detail
from .config import (
    CodecStage,
    LpfStage,
    MaskedFeatureStage,
    MaskedSpecStage,
    Mode,
    NormalizeStage,
    PipelineConfig,
)
from .errors import ConfigError, SampleRateMismatchError, SpoofAugError
from .features import (
    load_features,
    masked_feature_with_plan,
    normalize_features,
    save_features,
    save_features_csv,
)
from .filters import apply_fir, design_lpf_kernel, draw_cutoff
from .masking import masked_spec_with_plan

log = logging.getLogger(__name__)

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = (1 << 64) - 1
MANIFEST_NAME = "manifest.jsonl"

AUDIO_EXTENSIONS = (".wav",)
FEATURE_EXTENSIONS = (".safm", ".csv")


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


def derive_file_seed(master_seed: int, relative_path: str) -> int:
    """FNV-1a 64 of the UTF-8 relative path (``/`` separators) XOR the master seed."""
    return fnv1a_64(relative_path.encode("utf-8")) ^ (master_seed & MASK64)


def list_inputs(config: PipelineConfig) -> list[str]:
    """Relative POSIX paths of the files to process, sorted."""
    if config.manifest:
        with open(config.manifest, encoding="utf-8") as fh:
            rels = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
        return sorted(set(r.replace(os.sep, "/") for r in rels))
    exts = AUDIO_EXTENSIONS if config.mode is Mode.AUDIO else FEATURE_EXTENSIONS
    out = []
    skip = os.path.abspath(config.output_dir)
    for root, dirs, files in os.walk(config.input_dir):
        dirs[:] = [d for d in dirs if os.path.abspath(os.path.join(root, d)) != skip]
        for name in files:
            if name.lower().endswith(exts):
                rel = os.path.relpath(os.path.join(root, name), config.input_dir)
                out.append(rel.replace(os.sep, "/"))
    return sorted(out)


def _fires(rng: np.random.Generator, probability: float) -> bool:
    # always consume one draw so later stages see the same stream either way
    return bool(rng.random() < probability)


def _augment_audio(config: PipelineConfig, src: str, dst: str, rng, record: dict) -> bool:
    audio = read_wav(src)
    if audio.sample_rate != config.sample_rate:
        raise SampleRateMismatchError(f"sample rate {audio.sample_rate} Hz does not match configured {config.sample_rate} Hz")
    applied = False
    for stage in config.stages:
        entry = {"type": stage.kind}
        fired = _fires(rng, stage.probability)
        entry["applied"] = fired
        if fired:
            applied = True
            if isinstance(stage, CodecStage):
                weights = np.array([c.weight for c in stage.choices], dtype=np.float64)
                idx = int(rng.choice(len(stage.choices), p=weights / weights.sum()))
                spec = stage.choices[idx].spec
                result = codec_roundtrip_detail(audio, spec)
                audio = result.audio
                entry.update(codec=spec.codec.value, bitrate_kbps=spec.bitrate_kbps, lag=result.lag)
            elif isinstance(stage, LpfStage):
                fc = draw_cutoff(rng, stage.cutoff_range)
                audio = apply_fir(audio, design_lpf_kernel(fc, stage.num_taps))
                entry.update(cutoff=fc, num_taps=stage.num_taps)
            elif isinstance(stage, MaskedSpecStage):
                res = masked_spec_with_plan(audio, stage.params, config.stft, rng)
                audio = res.audio
                entry.update(shape=stage.params.shape.value, patches=len(res.plan.patches),
                             fill=[res.fill.magnitude, res.fill.phase])
                if config.emit_provenance:
                    entry["plan"] = res.plan.to_dict()
        record["stages"].append(entry)
    if applied:
        write_wav(audio, dst)
    return applied


def _augment_features(config: PipelineConfig, src: str, dst: str, rng, record: dict) -> bool:
    feats = load_features(src)
    applied = False
    for stage in config.stages:
        entry = {"type": stage.kind}
        if isinstance(stage, NormalizeStage):
            feats = normalize_features(feats, per_dimension=stage.per_dimension)
            entry.update(applied=True, per_dimension=stage.per_dimension)
            applied = True
        elif isinstance(stage, MaskedFeatureStage):
            fired = _fires(rng, stage.probability)
            entry["applied"] = fired
            if fired:
                applied = True
                feats, plan, fill = masked_feature_with_plan(feats, stage.params, rng)
                entry.update(shape=stage.params.shape.value, patches=len(plan.patches), fill=fill)
                if config.emit_provenance:
                    entry["plan"] = plan.to_dict()
        record["stages"].append(entry)
    if applied:
        if dst.lower().endswith(".csv"):
            save_features_csv(feats, dst)
        else:
            save_features(feats, dst)
    return applied


def process_file(config: PipelineConfig, rel_path: str) -> dict:
    """Augment one file and return its manifest record.

    Everything random derives from ``(master_seed, rel_path)``, so calling this
    in isolation reproduces the same output bytes as a full run.
    """
    seed = derive_file_seed(config.master_seed, rel_path)
    record = {"path": rel_path, "seed": seed, "stages": []}
    src = os.path.join(config.input_dir, *rel_path.split("/"))
    dst = os.path.join(config.output_dir, *rel_path.split("/"))
    rng = np.random.default_rng(seed)
    try:
        os.makedirs(os.path.dirname(dst), exist_ok=True)
        if config.mode is Mode.AUDIO:
            applied = _augment_audio(config, src, dst, rng, record)
        else:
            applied = _augment_features(config, src, dst, rng, record)
        if not applied:
            shutil.copyfile(src, dst)
        record["status"] = "ok"
    except (SpoofAugError, OSError, ValueError) as exc:
        log.warning("failed on %s: %s", rel_path, exc)
        record["status"] = "error"
        record["error"] = f"{type(exc).__name__}: {exc}"
    if config.emit_provenance and record["status"] == "ok":
        plans = [s["plan"] for s in record["stages"] if "plan" in s]
        if plans:
            with open(dst + ".mask.json", "w", encoding="utf-8", newline="\n") as fh:
                json.dump(plans, fh, indent=2, sort_keys=True)
                fh.write("\n")
    return record


@dataclass(frozen=True)
class RunSummary:
    processed: int
    succeeded: int
    failed: int
    manifest_path: str

    @property
    def exit_code(self) -> int:
        return 0 if self.failed == 0 else 1


def run_augment_pipeline(config: PipelineConfig) -> RunSummary:
    """Process every input file and write a JSON-lines manifest in path order."""
    if not os.path.isdir(config.input_dir):
        raise ConfigError(f"input directory {config.input_dir!r} does not exist")
    if os.path.abspath(config.input_dir) == os.path.abspath(config.output_dir):
        raise ConfigError("output_dir must differ from input_dir")
    rels = list_inputs(config)
    os.makedirs(config.output_dir, exist_ok=True)
    if config.parallelism == 1:
        records = [process_file(config, r) for r in rels]
    else:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            records = list(pool.map(lambda r: process_file(config, r), rels))
    records.sort(key=lambda rec: rec["path"])
    manifest_path = os.path.join(config.output_dir, MANIFEST_NAME)
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    failed = sum(rec["status"] != "ok" for rec in records)
    return RunSummary(len(records), len(records) - failed, failed, manifest_path)
