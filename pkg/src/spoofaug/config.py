"""Pipeline configuration loaded from TOML."""

from __future__ import annotations

import enum
import os
import sys
from dataclasses import dataclass, field
from typing import Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .codec import DEFAULT_DECODER_TEMPLATE, DEFAULT_ENCODER_TEMPLATE, CodecSpec
from .errors import ConfigError
from .filters import DEFAULT_CUTOFF_RANGE, DEFAULT_TAPS
from .masking import MaskParams, MaskShape
from .stft import StftConfig


class Mode(str, enum.Enum):
    AUDIO = "audio"
    FEATURES = "features"


def _check_probability(p) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"stage probability must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class CodecChoice:
    spec: CodecSpec
    weight: float = 1.0


@dataclass(frozen=True)
class CodecStage:
    choices: tuple[CodecChoice, ...]
    probability: float = 1.0
    kind = "codec"


@dataclass(frozen=True)
class LpfStage:
    cutoff_range: tuple[float, float] = DEFAULT_CUTOFF_RANGE
    num_taps: int = DEFAULT_TAPS
    probability: float = 1.0
    kind = "lpf"


@dataclass(frozen=True)
class MaskedSpecStage:
    params: MaskParams
    probability: float = 1.0
    kind = "masked_spec"


@dataclass(frozen=True)
class MaskedFeatureStage:
    params: MaskParams
    probability: float = 1.0
    kind = "masked_feature"


@dataclass(frozen=True)
class NormalizeStage:
    per_dimension: bool = False
    kind = "normalize_features"


Stage = Union[CodecStage, LpfStage, MaskedSpecStage, MaskedFeatureStage, NormalizeStage]
AUDIO_STAGES = (CodecStage, LpfStage, MaskedSpecStage)
FEATURE_STAGES = (MaskedFeatureStage, NormalizeStage)


@dataclass(frozen=True)
class PipelineConfig:
    input_dir: str
    output_dir: str
    mode: Mode = Mode.AUDIO
    stages: tuple[Stage, ...] = ()
    stft: StftConfig = field(default_factory=StftConfig)
    master_seed: int = 0
    sample_rate: int = 16000
    parallelism: int = 1
    manifest: str | None = None
    emit_provenance: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed}")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        allowed = AUDIO_STAGES if self.mode is Mode.AUDIO else FEATURE_STAGES
        for st in self.stages:
            if not isinstance(st, allowed):
                raise ConfigError(f"stage {st.kind!r} is not valid in {self.mode.value} mode")


def _pair(value, name, cast=float):
    try:
        lo, hi = value
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a two-element list") from None
    return cast(lo), cast(hi)


def _mask_params(table: dict) -> MaskParams:
    if "shape" not in table:
        raise ConfigError("mask stage needs a 'shape'")
    base = MaskParams.defaults(table["shape"])
    kwargs = {}
    for key in ("time_extent_range", "freq_extent_range", "sigma_range", "peak_alpha_range"):
        if key in table:
            kwargs[key] = _pair(table[key], key)
    if "patch_count_range" in table:
        kwargs["patch_count_range"] = _pair(table["patch_count_range"], "patch_count_range", int)
    try:
        return MaskParams(
            MaskShape(table["shape"]),
            kwargs.get("patch_count_range", base.patch_count_range),
            kwargs.get("time_extent_range", base.time_extent_range),
            kwargs.get("freq_extent_range", base.freq_extent_range),
            kwargs.get("sigma_range", base.sigma_range),
            kwargs.get("peak_alpha_range", base.peak_alpha_range),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _stage(table: dict) -> Stage:
    kind = table.get("type")
    prob = _check_probability(table.get("probability", 1.0))
    try:
        if kind == "codec":
            raw = table.get("choices")
            if not raw:
                raise ConfigError("codec stage needs at least one [[stages.choices]] entry")
            choices = []
            for c in raw:
                spec = CodecSpec(
                    c["codec"],
                    int(c.get("bitrate_kbps", 16)),
                    c.get("encoder_template", DEFAULT_ENCODER_TEMPLATE),
                    c.get("decoder_template", DEFAULT_DECODER_TEMPLATE),
                )
                weight = float(c.get("weight", 1.0))
                if weight <= 0:
                    raise ConfigError("codec choice weights must be positive")
                choices.append(CodecChoice(spec, weight))
            return CodecStage(tuple(choices), prob)
        if kind == "lpf":
            lo, hi = _pair(table.get("cutoff_range", DEFAULT_CUTOFF_RANGE), "cutoff_range")
            if not 0 < lo <= hi < 0.5:
                raise ConfigError(f"cutoff_range must satisfy 0 < lo <= hi < 0.5, got [{lo}, {hi}]")
            taps = int(table.get("num_taps", DEFAULT_TAPS))
            if taps < 3 or taps % 2 == 0:
                raise ConfigError(f"num_taps must be odd and >= 3, got {taps}")
            return LpfStage((lo, hi), taps, prob)
        if kind == "masked_spec":
            return MaskedSpecStage(_mask_params(table), prob)
        if kind == "masked_feature":
            return MaskedFeatureStage(_mask_params(table), prob)
        if kind == "normalize_features":
            return NormalizeStage(bool(table.get("per_dimension", False)))
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad {kind} stage: {exc}") from exc
    raise ConfigError(f"unknown stage type {kind!r}")


def config_from_dict(doc: dict, base_dir: str = ".") -> PipelineConfig:
    """Build a :class:`PipelineConfig`; relative paths resolve against ``base_dir``."""
    io = doc.get("io", {})
    if "input_dir" not in io or "output_dir" not in io:
        raise ConfigError("[io] needs input_dir and output_dir")

    def path(p):
        return p if p is None else os.path.normpath(os.path.join(base_dir, p))

    st = doc.get("stft", {})
    try:
        stft = StftConfig(int(st.get("frame_size", 512)), int(st.get("hop", 256)), st.get("window", "hann"))
        mode = Mode(doc.get("mode", "audio"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return PipelineConfig(
        input_dir=path(io["input_dir"]),
        output_dir=path(io["output_dir"]),
        mode=mode,
        stages=tuple(_stage(t) for t in doc.get("stages", [])),
        stft=stft,
        master_seed=int(doc.get("master_seed", 0)),
        sample_rate=int(io.get("sample_rate", 16000)),
        parallelism=int(doc.get("parallelism", 1)),
        manifest=path(io.get("manifest")),
        emit_provenance=bool(doc.get("emit_provenance", False)),
    )


def load_config(path) -> PipelineConfig:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(doc, os.path.dirname(os.path.abspath(path)))
