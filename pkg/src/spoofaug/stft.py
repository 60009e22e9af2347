"""Forward/inverse STFT and the complex mean used as the masking fill value."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer
from .errors import (
    EmptySpectrogramError,
    NonInvertibleConfigError,
    SignalTooShortError,
)


class Window(str, enum.Enum):
    HANN = "hann"
    RECTANGULAR = "rectangular"


@dataclass(frozen=True)
class StftConfig:
    """Framing parameters: frame size N, hop H and analysis window."""

    frame_size: int = 512
    hop: int = 256
    window: Window = Window.HANN

    def __post_init__(self):
        object.__setattr__(self, "window", Window(self.window))
        if self.frame_size <= 0 or self.frame_size % 2:
            raise ValueError(f"frame_size must be a positive even integer, got {self.frame_size}")
        if not 0 < self.hop <= self.frame_size:
            raise ValueError(f"hop must satisfy 0 < hop <= frame_size, got {self.hop}")

    @property
    def n_bins(self) -> int:
        return self.frame_size // 2 + 1

    def window_array(self) -> np.ndarray:
        n = self.frame_size
        if self.window is Window.RECTANGULAR:
            return np.ones(n)
        # periodic Hann: exact COLA at hop N/k
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)

    def is_cola(self) -> bool:
        """True when shifted copies of the window sum to a constant."""
        n, h = self.frame_size, self.hop
        if self.window is Window.RECTANGULAR:
            return h == n
        if n % h:
            return False
        w = self.window_array()
        total = w.reshape(-1, h).sum(axis=0)
        return bool(np.allclose(total, total[0], rtol=0, atol=1e-12) and total[0] > 0)

    def n_frames(self, length: int) -> int:
        if length < self.frame_size:
            return 0
        return (length - self.frame_size) // self.hop + 1


@dataclass(frozen=True, eq=False)
class ComplexSpectrogram:
    """One-sided STFT, ``bins[m, k]`` for frame m and frequency bin k."""

    bins: np.ndarray
    config: StftConfig
    original_length: int
    sample_rate: int = 16000

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.complex128)
        if bins.ndim != 2 or bins.shape[1] != self.config.n_bins:
            raise ValueError(
                f"bins must have shape (M, {self.config.n_bins}), got {bins.shape}"
            )
        expected = self.config.n_frames(self.original_length)
        if bins.shape[0] != expected or expected < 1:
            raise ValueError(
                f"{bins.shape[0]} frames inconsistent with original_length "
                f"{self.original_length} (expected {expected})"
            )
        if not np.all(np.isfinite(bins)):
            raise ValueError("spectrogram bins must be finite")
        bins.setflags(write=False)
        object.__setattr__(self, "bins", bins)

    @property
    def shape(self) -> tuple[int, int]:
        return self.bins.shape

    def with_bins(self, bins: np.ndarray) -> "ComplexSpectrogram":
        return ComplexSpectrogram(bins, self.config, self.original_length, self.sample_rate)


@dataclass(frozen=True)
class ComplexMean:
    magnitude: float
    phase: float

    def __post_init__(self):
        if not self.magnitude >= 0:
            raise ValueError("mean magnitude must be non-negative")

    @property
    def value(self) -> complex:
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))


def compute_stft(audio: AudioBuffer, config: StftConfig = StftConfig()) -> ComplexSpectrogram:
    """Frame, window and FFT the signal without padding.

    The trailing partial frame is dropped; ``original_length`` remembers the
    full duration so the inverse can restore it.
    """
    x = audio.samples
    n, h = config.frame_size, config.hop
    if len(x) < n:
        raise SignalTooShortError(f"signal of {len(x)} samples is shorter than frame size {n}")
    m = config.n_frames(len(x))
    idx = np.arange(n)[None, :] + h * np.arange(m)[:, None]
    frames = x[idx] * config.window_array()[None, :]
    return ComplexSpectrogram(np.fft.rfft(frames, axis=1), config, len(x), audio.sample_rate)


def compute_istft(spec: ComplexSpectrogram) -> AudioBuffer:
    """Weighted overlap-add inverse normalised per sample by the summed squared window.

    Samples never covered by a frame, or covered only by zero window weight,
    come out as zero.
    """
    config = spec.config
    if not config.is_cola():
        raise NonInvertibleConfigError(
            f"{config.window.value} window with frame {config.frame_size} and hop "
            f"{config.hop} violates constant overlap-add"
        )
    n, h = config.frame_size, config.hop
    m = spec.bins.shape[0]
    w = config.window_array()
    # irfft discards the imaginary part of DC/Nyquist, i.e. imposes Hermitian symmetry
    frames = np.fft.irfft(spec.bins, n=n, axis=1) * w[None, :]

    span = (m - 1) * h + n
    out = np.zeros(span)
    norm = np.zeros(span)
    w2 = w * w
    for i in range(m):
        out[i * h : i * h + n] += frames[i]
        norm[i * h : i * h + n] += w2
    covered = norm > 1e-10
    out[covered] /= norm[covered]
    out[~covered] = 0.0

    length = spec.original_length
    if span < length:
        out = np.concatenate([out, np.zeros(length - span)])
    return AudioBuffer(out[:length], spec.sample_rate)


def _principal_angle(z: np.ndarray) -> np.ndarray:
    """arg(z) in (-pi, pi], with arg(0) := 0."""
    ang = np.angle(z)
    ang = np.where(ang <= -np.pi, np.pi, ang)
    return np.where(z == 0, 0.0, ang)


def stft_mean(spec: ComplexSpectrogram) -> ComplexMean:
    """Mean bin magnitude and arithmetic mean of principal-value bin phases."""
    return complex_mean(spec.bins)


def complex_mean(values: np.ndarray) -> ComplexMean:
    values = np.asarray(values, dtype=np.complex128)
    if values.size == 0:
        raise EmptySpectrogramError("cannot average an empty spectrogram")
    mag = float(np.mean(np.abs(values)))
    phase = float(np.mean(_principal_angle(values)))
    return ComplexMean(mag, phase)


def write_magnitude_csv(spec: ComplexSpectrogram, path) -> None:
    """One row per frame, K magnitudes at 9 significant digits."""
    mags = np.abs(spec.bins)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in mags:
            fh.write(",".join(f"{v:.9g}" for v in row))
            fh.write("\n")
