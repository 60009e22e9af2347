"""Mono PCM WAV reading/writing and the in-memory signal container."""

from __future__ import annotations

import os
import struct
import wave
from dataclasses import dataclass

import numpy as np

from .errors import CorruptHeaderError, EmptyBufferError, UnsupportedFormatError

# full-scale magnitude per sample width in bytes
_FULL_SCALE = {2: 32768.0, 3: 8388608.0, 4: 2147483648.0}


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono signal with amplitudes nominally in [-1, 1].

    The sample array is copied to float64 and made read-only on construction.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(samples)):
            raise ValueError("audio samples must be finite")
        if int(self.sample_rate) <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    def require_nonempty(self):
        if len(self) == 0:
            raise EmptyBufferError("operation requires a non-empty audio buffer")


def _decode_pcm(raw: bytes, width: int) -> np.ndarray:
    if width == 2:
        ints = np.frombuffer(raw, dtype="<i2").astype(np.int64)
    elif width == 4:
        ints = np.frombuffer(raw, dtype="<i4").astype(np.int64)
    else:  # 24-bit: sign-extend three little-endian bytes
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int64)
        ints = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
    return ints / _FULL_SCALE[width]


def read_wav(path) -> AudioBuffer:
    """Read a mono integer-PCM WAV file.

    Accepts 16, 24 and 32-bit samples; values are divided by the format's
    full-scale magnitude (32768 for 16-bit).

    Raises:
        FileNotFoundError: the file does not exist.
        UnsupportedFormatError: not mono, not integer PCM, or unsupported depth.
        CorruptHeaderError: the RIFF/WAVE structure cannot be parsed.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    try:
        with wave.open(path, "rb") as wf:
            channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            n_frames = wf.getnframes()
            raw = wf.readframes(n_frames)
    except wave.Error as exc:
        msg = str(exc)
        if "unknown format" in msg:
            raise UnsupportedFormatError(f"{path}: {msg}") from exc
        raise CorruptHeaderError(f"{path}: {msg}") from exc
    except (EOFError, struct.error) as exc:
        raise CorruptHeaderError(f"{path}: truncated header") from exc

    if channels != 1:
        raise UnsupportedFormatError(f"{path}: expected 1 channel, found {channels}")
    if width not in _FULL_SCALE:
        raise UnsupportedFormatError(f"{path}: unsupported sample width {8 * width} bits")
    if rate <= 0:
        raise CorruptHeaderError(f"{path}: invalid sample rate {rate}")
    usable = len(raw) - len(raw) % width
    return AudioBuffer(_decode_pcm(raw[:usable], width), rate)


def quantize_pcm16(samples: np.ndarray) -> np.ndarray:
    """Clamp to [-1, 1] and round to 16-bit integers (1.0 maps to 32767)."""
    scaled = np.round(np.clip(samples, -1.0, 1.0) * 32768.0)
    return np.clip(scaled, -32768, 32767).astype("<i2")


def write_wav(buffer: AudioBuffer, path) -> None:
    """Write ``buffer`` as a 16-bit PCM mono WAV file, clamping out-of-range samples."""
    buffer.require_nonempty()
    pcm = quantize_pcm16(buffer.samples)
    with wave.open(os.fspath(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(buffer.sample_rate)
        wf.writeframes(pcm.tobytes())
