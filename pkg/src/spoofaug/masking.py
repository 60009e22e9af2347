"""Stochastic occlusion masks for spectrograms and feature matrices.

Four mask shapes are supported. Squares, Bands and Singles are hard masks
whose cells are replaced by the fill value. Gauss patches blend each cell
towards the fill value with a Gaussian-shaped weight. Rows of a plan are
time steps (frames) and columns are frequency bins or feature dimensions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .audio_io import AudioBuffer
from .errors import DimsMismatchError, EmptyDimsError
from .stft import (
    ComplexMean,
    ComplexSpectrogram,
    StftConfig,
    compute_istft,
    compute_stft,
    stft_mean,
)


class MaskShape(str, enum.Enum):
    SQUARES = "squares"
    BANDS = "bands"
    SINGLES = "singles"
    GAUSS = "gauss"


def _check_interval(name, lo, hi, lower_open=0.0, upper=1.0):
    if not (lower_open < lo <= hi <= upper):
        raise ValueError(f"{name} must satisfy {lower_open} < lo <= hi <= {upper}, got [{lo}, {hi}]")


@dataclass(frozen=True)
class MaskParams:
    """Recipe for drawing a mask plan.

    Extents and sigmas are fractions of the corresponding axis length.
    """

    shape: MaskShape
    patch_count_range: tuple[int, int] = (1, 5)
    time_extent_range: tuple[float, float] = (0.05, 0.15)
    freq_extent_range: tuple[float, float] = (0.05, 0.15)
    sigma_range: tuple[float, float] = (0.02, 0.10)
    peak_alpha_range: tuple[float, float] = (0.5, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "shape", MaskShape(self.shape))
        for name in ("patch_count_range", "time_extent_range", "freq_extent_range",
                     "sigma_range", "peak_alpha_range"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        c_min, c_max = self.patch_count_range
        if not (0 <= c_min <= c_max) or int(c_min) != c_min or int(c_max) != c_max:
            raise ValueError(f"patch_count_range must be integers 0 <= lo <= hi, got {self.patch_count_range}")
        _check_interval("time_extent_range", *self.time_extent_range)
        _check_interval("freq_extent_range", *self.freq_extent_range)
        _check_interval("sigma_range", *self.sigma_range)
        _check_interval("peak_alpha_range", *self.peak_alpha_range)

    @classmethod
    def defaults(cls, shape) -> "MaskParams":
        """Default ranges per shape; Bands use wider frequency extents."""
        shape = MaskShape(shape)
        if shape is MaskShape.BANDS:
            return cls(shape, freq_extent_range=(0.05, 0.20))
        return cls(shape)


@dataclass(frozen=True)
class SquarePatch:
    t0: int
    t1: int
    k0: int
    k1: int


@dataclass(frozen=True)
class BandPatch:
    k0: int
    k1: int


@dataclass(frozen=True)
class SinglePatch:
    k: int


@dataclass(frozen=True)
class GaussPatch:
    tc: float
    kc: float
    sigma_t: float
    sigma_k: float
    alpha_max: float


Patch = Union[SquarePatch, BandPatch, SinglePatch, GaussPatch]

_PATCH_KINDS = {
    SquarePatch: "square",
    BandPatch: "band",
    SinglePatch: "single",
    GaussPatch: "gauss",
}
_KIND_TO_PATCH = {v: k for k, v in _PATCH_KINDS.items()}


@dataclass(frozen=True)
class MaskPlan:
    dims: tuple[int, int]
    patches: tuple[Patch, ...] = ()
    shape: MaskShape | None = None

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "patches", tuple(self.patches))
        if self.shape is not None:
            object.__setattr__(self, "shape", MaskShape(self.shape))
        n_t, n_k = self.dims
        for p in self.patches:
            if isinstance(p, SquarePatch):
                ok = 0 <= p.t0 <= p.t1 < n_t and 0 <= p.k0 <= p.k1 < n_k
            elif isinstance(p, BandPatch):
                ok = 0 <= p.k0 <= p.k1 < n_k
            elif isinstance(p, SinglePatch):
                ok = 0 <= p.k < n_k
            elif isinstance(p, GaussPatch):
                ok = 0 < p.alpha_max <= 1 and p.sigma_t > 0 and p.sigma_k > 0
            else:
                raise TypeError(f"unknown patch type {type(p).__name__}")
            if not ok:
                raise ValueError(f"patch {p} does not fit dims {self.dims}")

    def hard_mask(self) -> np.ndarray:
        """Boolean union of all hard patches."""
        mask = np.zeros(self.dims, dtype=bool)
        for p in self.patches:
            if isinstance(p, SquarePatch):
                mask[p.t0 : p.t1 + 1, p.k0 : p.k1 + 1] = True
            elif isinstance(p, BandPatch):
                mask[:, p.k0 : p.k1 + 1] = True
            elif isinstance(p, SinglePatch):
                mask[:, p.k] = True
        return mask

    def blend_weights(self) -> np.ndarray:
        """Gauss blend coefficient per cell, summed over patches and clipped to 1."""
        n_t, n_k = self.dims
        alpha = np.zeros(self.dims)
        t = np.arange(n_t)[:, None]
        k = np.arange(n_k)[None, :]
        for p in self.patches:
            if isinstance(p, GaussPatch):
                alpha += p.alpha_max * np.exp(
                    -((t - p.tc) ** 2 / (2 * p.sigma_t ** 2) + (k - p.kc) ** 2 / (2 * p.sigma_k ** 2))
                )
        return np.minimum(alpha, 1.0)

    def to_dict(self) -> dict:
        patches = []
        for p in self.patches:
            d = {"kind": _PATCH_KINDS[type(p)]}
            d.update({name: getattr(p, name) for name in p.__dataclass_fields__})
            patches.append(d)
        return {
            "shape": self.shape.value if self.shape is not None else None,
            "dims": list(self.dims),
            "patches": patches,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MaskPlan":
        patches = []
        for d in data["patches"]:
            d = dict(d)
            kind = _KIND_TO_PATCH[d.pop("kind")]
            patches.append(kind(**d))
        return cls(tuple(data["dims"]), tuple(patches), data.get("shape"))


def _extent(rng: np.random.Generator, frac_range, axis_len: int) -> int:
    frac = rng.uniform(*frac_range)
    return int(min(axis_len, max(1, round(frac * axis_len))))


def generate_mask_plan(params: MaskParams, dims, rng: np.random.Generator) -> MaskPlan:
    """Draw a random plan; deterministic given ``params``, ``dims`` and the rng state."""
    n_t, n_k = (int(d) for d in dims)
    if n_t < 1 or n_k < 1:
        raise EmptyDimsError(f"mask dims must be positive, got {dims}")
    c_min, c_max = params.patch_count_range
    count = int(rng.integers(c_min, c_max + 1))
    patches: list[Patch] = []
    for _ in range(count):
        if params.shape is MaskShape.SQUARES:
            dt = _extent(rng, params.time_extent_range, n_t)
            dk = _extent(rng, params.freq_extent_range, n_k)
            t0 = int(rng.integers(0, n_t - dt + 1))
            k0 = int(rng.integers(0, n_k - dk + 1))
            patches.append(SquarePatch(t0, t0 + dt - 1, k0, k0 + dk - 1))
        elif params.shape is MaskShape.BANDS:
            dk = _extent(rng, params.freq_extent_range, n_k)
            k0 = int(rng.integers(0, n_k - dk + 1))
            patches.append(BandPatch(k0, k0 + dk - 1))
        elif params.shape is MaskShape.SINGLES:
            patches.append(SinglePatch(int(rng.integers(0, n_k))))
        else:
            tc = int(rng.integers(0, n_t))
            kc = int(rng.integers(0, n_k))
            sigma_t = float(rng.uniform(*params.sigma_range)) * n_t
            sigma_k = float(rng.uniform(*params.sigma_range)) * n_k
            alpha = float(rng.uniform(*params.peak_alpha_range))
            patches.append(GaussPatch(float(tc), float(kc), sigma_t, sigma_k, alpha))
    return MaskPlan((n_t, n_k), tuple(patches), params.shape)


def _apply(values: np.ndarray, plan: MaskPlan, fill):
    if tuple(values.shape) != plan.dims:
        raise DimsMismatchError(f"plan dims {plan.dims} do not match data shape {values.shape}")
    out = values.copy()
    if not plan.patches:
        return out
    alpha = plan.blend_weights()
    soft = alpha > 0
    if soft.any():
        out[soft] = (1.0 - alpha[soft]) * values[soft] + alpha[soft] * fill
    out[plan.hard_mask()] = fill
    return out


def apply_mask_spectrogram(spec: ComplexSpectrogram, plan: MaskPlan, fill: ComplexMean) -> ComplexSpectrogram:
    """Replace hard-masked bins with the complex mean and blend Gauss regions towards it."""
    return spec.with_bins(_apply(spec.bins, plan, fill.value))


def apply_mask_features(features, plan: MaskPlan, fill: float):
    """Real-valued counterpart of :func:`apply_mask_spectrogram`.

    ``features`` is a :class:`~spoofaug.features.FeatureMatrix`; time steps map
    to plan rows and feature dimensions to plan columns.
    """
    from .features import FeatureMatrix

    return FeatureMatrix(_apply(features.values, plan, float(fill)))


@dataclass(frozen=True)
class MaskedSpecResult:
    audio: AudioBuffer
    plan: MaskPlan
    fill: ComplexMean = field(repr=False)


def masked_spec_with_plan(audio: AudioBuffer, params: MaskParams, config: StftConfig,
                          rng: np.random.Generator) -> MaskedSpecResult:
    spec = compute_stft(audio, config)
    fill = stft_mean(spec)
    plan = generate_mask_plan(params, spec.shape, rng)
    out = compute_istft(apply_mask_spectrogram(spec, plan, fill))
    return MaskedSpecResult(out, plan, fill)


def masked_spec_augment(audio: AudioBuffer, params: MaskParams, config: StftConfig,
                        rng: np.random.Generator) -> AudioBuffer:
    """MaskedSpec: STFT, occlude with the complex mean, resynthesise.

    Output has the same length and sample rate as ``audio``.
    """
    return masked_spec_with_plan(audio, params, config, rng).audio
