"""Windowed-sinc low-pass FIR design and zero-delay direct-form filtering."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer
from .errors import InvalidCutoffError, InvalidLengthError

DEFAULT_TAPS = 101
DEFAULT_CUTOFF_RANGE = (0.1, 0.4)


@dataclass(frozen=True, eq=False)
class FilterKernel:
    """Symmetric FIR taps; ``taps[center]`` is the zero-offset coefficient."""

    taps: np.ndarray
    cutoff: float

    def __post_init__(self):
        taps = np.array(self.taps, dtype=np.float64)
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @property
    def length(self) -> int:
        return self.taps.shape[0]

    @property
    def center(self) -> int:
        return (self.length - 1) // 2


def hamming(m: int) -> np.ndarray:
    """Symmetric Hamming window over ``m`` points."""
    n = np.arange(m)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (m - 1))


def design_lpf_kernel(cutoff: float, num_taps: int = DEFAULT_TAPS) -> FilterKernel:
    """Hamming-windowed sinc low-pass kernel.

    Args:
      cutoff: normalised cutoff in cycles/sample, strictly inside (0, 0.5).
      num_taps: odd kernel length, at least 3.

    Returns:
      FilterKernel whose centre tap is exactly ``2 * cutoff``.
    """
    if not (isinstance(num_taps, (int, np.integer)) and num_taps >= 3 and num_taps % 2 == 1):
        raise InvalidLengthError(f"num_taps must be an odd integer >= 3, got {num_taps}")
    if not (0.0 < cutoff < 0.5) or not math.isfinite(cutoff):
        raise InvalidCutoffError(f"cutoff must lie in (0, 0.5) cycles/sample, got {cutoff}")
    half = (num_taps - 1) // 2
    # evaluate offsets 1..half once and mirror, so taps are exactly symmetric
    m = np.arange(1, half + 1, dtype=np.float64)
    window = hamming(num_taps)[half + 1 :]
    side = np.sin(2.0 * np.pi * cutoff * m) / (np.pi * m) * window
    taps = np.concatenate([side[::-1], [2.0 * cutoff], side])
    return FilterKernel(taps, float(cutoff))


def apply_fir(audio: AudioBuffer, kernel: FilterKernel) -> AudioBuffer:
    """Convolve with zero-padded edges, then drop the (M-1)/2 sample delay.

    The output has the input's length and is time-aligned with it.
    """
    audio.require_nonempty()
    full = np.convolve(audio.samples, kernel.taps, mode="full")
    c = kernel.center
    return AudioBuffer(full[c : c + len(audio)], audio.sample_rate)


def draw_cutoff(rng: np.random.Generator, cutoff_range=DEFAULT_CUTOFF_RANGE) -> float:
    lo, hi = cutoff_range
    if not (0.0 < lo <= hi < 0.5):
        raise InvalidCutoffError(f"cutoff range must satisfy 0 < lo <= hi < 0.5, got {cutoff_range}")
    return float(rng.uniform(lo, hi))


def random_lpf_augment(audio: AudioBuffer, cutoff_range=DEFAULT_CUTOFF_RANGE,
                       num_taps: int = DEFAULT_TAPS, rng: np.random.Generator | None = None) -> AudioBuffer:
    """Low-pass filter with a cutoff drawn uniformly from ``cutoff_range``."""
    if rng is None:
        raise ValueError("an explicit rng is required for reproducible augmentation")
    fc = draw_cutoff(rng, cutoff_range)
    return apply_fir(audio, design_lpf_kernel(fc, num_taps))
