"""Deterministic audio augmentation and anti-spoofing evaluation toolkit."""

__version__ = "0.1.0"

from .audio_io import AudioBuffer, read_wav, write_wav
from .codec import Codec, CodecSpec, check_encoder, codec_roundtrip
from .features import (
    FeatureMatrix,
    load_features,
    masked_feature_augment,
    normalize_features,
    save_features,
)
from .filters import FilterKernel, apply_fir, design_lpf_kernel, random_lpf_augment
from .masking import (
    MaskParams,
    MaskPlan,
    MaskShape,
    apply_mask_features,
    apply_mask_spectrogram,
    generate_mask_plan,
    masked_spec_augment,
)
from .metrics import (
    EerResult,
    ScoreRecord,
    ScoreSet,
    compute_eer,
    fuse_score_sets,
    load_scores,
    pooled_eer,
    write_report,
)
from .pipeline import derive_file_seed, run_augment_pipeline
from .stft import (
    ComplexMean,
    ComplexSpectrogram,
    StftConfig,
    Window,
    compute_istft,
    compute_stft,
    stft_mean,
)
