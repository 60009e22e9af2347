"""Lossy compression-decompression augmentation through an external transcoder.

The default templates target an ffmpeg-compatible command line. The
``SPOOFAUG_ENCODER`` environment variable replaces the binary named in the
first token of both templates.
"""

from __future__ import annotations

import enum
import os
import shlex
import subprocess
import tempfile
import threading
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer, read_wav, write_wav
from .errors import (
    CorruptHeaderError,
    EncoderUnavailableError,
    OutputUnreadableError,
    SampleRateChangedError,
    SubprocessFailedError,
    UnsupportedFormatError,
)

ENCODER_ENV = "SPOOFAUG_ENCODER"
DEFAULT_ENCODER_TEMPLATE = "ffmpeg -y -hide_banner -loglevel error -i {input} -b:a {bitrate}k {output}"
DEFAULT_DECODER_TEMPLATE = "ffmpeg -y -hide_banner -loglevel error -i {input} {output}"
ALIGN_WINDOW = 4096

_limit_lock = threading.Lock()
_subprocess_slots = threading.BoundedSemaphore(os.cpu_count() or 1)


def set_subprocess_limit(n: int) -> None:
    """Bound the number of concurrently running transcoder processes."""
    global _subprocess_slots
    if n < 1:
        raise ValueError("subprocess limit must be >= 1")
    with _limit_lock:
        _subprocess_slots = threading.BoundedSemaphore(n)


class Codec(str, enum.Enum):
    MP3 = "mp3"
    M4A = "m4a"
    PASSTHROUGH = "passthrough"

    @property
    def extension(self) -> str:
        return "." + self.value


@dataclass(frozen=True)
class CodecSpec:
    codec: Codec
    bitrate_kbps: int = 16
    encoder_template: str = DEFAULT_ENCODER_TEMPLATE
    decoder_template: str = DEFAULT_DECODER_TEMPLATE

    def __post_init__(self):
        object.__setattr__(self, "codec", Codec(self.codec))
        if self.codec is Codec.PASSTHROUGH:
            return
        if int(self.bitrate_kbps) <= 0:
            raise ValueError(f"bitrate must be positive, got {self.bitrate_kbps}")
        for name, template, keys in (
            ("encoder_template", self.encoder_template, ("{input}", "{output}", "{bitrate}")),
            ("decoder_template", self.decoder_template, ("{input}", "{output}")),
        ):
            missing = [k for k in keys if k not in template]
            if missing:
                raise ValueError(f"{name} lacks placeholders {missing}: {template!r}")

    def binary(self) -> str:
        return os.environ.get(ENCODER_ENV) or shlex.split(self.encoder_template)[0]

    def _argv(self, template: str, **values) -> list[str]:
        argv = [tok.format(**values) for tok in shlex.split(template)]
        override = os.environ.get(ENCODER_ENV)
        if override:
            argv[0] = override
        return argv

    def encode_argv(self, src, dst) -> list[str]:
        return self._argv(self.encoder_template, input=src, output=dst, bitrate=self.bitrate_kbps)

    def decode_argv(self, src, dst) -> list[str]:
        return self._argv(self.decoder_template, input=src, output=dst)


@dataclass(frozen=True)
class EncoderStatus:
    available: bool
    detail: str


def check_encoder(spec: CodecSpec, timeout: float = 20.0) -> EncoderStatus:
    """Probe the transcoder with ``-version``. Never raises."""
    if spec.codec is Codec.PASSTHROUGH:
        return EncoderStatus(True, "passthrough: no encoder needed")
    try:
        binary = spec.binary()
        proc = subprocess.run([binary, "-version"], capture_output=True, text=True, timeout=timeout)
    except (OSError, ValueError, subprocess.SubprocessError) as exc:
        return EncoderStatus(False, f"cannot run encoder: {exc}")
    if proc.returncode != 0:
        return EncoderStatus(False, f"{binary} -version exited {proc.returncode}: {proc.stderr.strip()}")
    lines = proc.stdout.strip().splitlines()
    return EncoderStatus(True, lines[0] if lines else binary)


def _run(argv: list[str]) -> None:
    with _subprocess_slots:
        try:
            proc = subprocess.run(argv, capture_output=True, text=True)
        except OSError as exc:
            raise EncoderUnavailableError(f"cannot run {argv[0]}: {exc}") from exc
    if proc.returncode != 0:
        raise SubprocessFailedError(argv, proc.returncode, proc.stderr)


def estimate_lag(reference: np.ndarray, decoded: np.ndarray, window: int = ALIGN_WINDOW,
                 tie_tolerance: float = 1e-3) -> int:
    """Lag of ``decoded`` relative to ``reference`` from leading-segment cross-correlation.

    A positive lag means the decoded signal starts late (encoder delay). Lags
    within +/- ``window`` samples are scored by normalised correlation; lags
    scoring within ``tie_tolerance`` of the best are resolved to the smallest
    magnitude, which matters for periodic signals.
    """
    w = min(window, len(reference), len(decoded))
    if w == 0:
        return 0
    ref = reference[:w]
    lags = np.arange(-(w // 2), min(window, len(decoded) - 1) + 1)
    scores = np.empty(len(lags))
    for i, lag in enumerate(lags):
        if lag >= 0:
            b = decoded[lag : lag + w]
            a = ref[: len(b)]
        else:
            a = ref[-lag:]
            b = decoded[: w + lag]
        denom = np.linalg.norm(a) * np.linalg.norm(b)
        scores[i] = np.dot(a, b) / denom if denom > 0 else 0.0
    best = scores.max()
    if not best > 0:
        return 0
    near = lags[scores >= best - tie_tolerance * abs(best)]
    return int(near[np.argmin(np.abs(near))])


def align_to_length(reference: np.ndarray, decoded: np.ndarray, lag: int | None = None) -> np.ndarray:
    """Shift ``decoded`` by ``lag`` (estimated when omitted), then trim or zero-pad to ``len(reference)``."""
    if lag is None:
        lag = estimate_lag(reference, decoded)
    if lag > 0:
        decoded = decoded[lag:]
    elif lag < 0:
        decoded = np.concatenate([np.zeros(-lag), decoded])
    n = len(reference)
    if len(decoded) >= n:
        return decoded[:n]
    return np.concatenate([decoded, np.zeros(n - len(decoded))])


@dataclass(frozen=True)
class RoundTripResult:
    audio: AudioBuffer
    decoded_length: int
    lag: int


def codec_roundtrip_detail(audio: AudioBuffer, spec: CodecSpec, workdir=None) -> RoundTripResult:
    """Like :func:`codec_roundtrip` but also reports the raw decoded length and lag."""
    audio.require_nonempty()
    if spec.codec is Codec.PASSTHROUGH:
        return RoundTripResult(audio, len(audio), 0)
    with tempfile.TemporaryDirectory(prefix="spoofaug-codec-", dir=workdir) as tmp:
        src = os.path.join(tmp, "input.wav")
        enc = os.path.join(tmp, "encoded" + spec.codec.extension)
        dec = os.path.join(tmp, "decoded.wav")
        write_wav(audio, src)
        _run(spec.encode_argv(src, enc))
        _run(spec.decode_argv(enc, dec))
        try:
            decoded = read_wav(dec)
        except (FileNotFoundError, UnsupportedFormatError, CorruptHeaderError) as exc:
            raise OutputUnreadableError(f"decoder output unreadable: {exc}") from exc
    if decoded.sample_rate != audio.sample_rate:
        raise SampleRateChangedError(
            f"codec changed sample rate from {audio.sample_rate} to {decoded.sample_rate}"
        )
    lag = estimate_lag(audio.samples, decoded.samples)
    aligned = align_to_length(audio.samples, decoded.samples, lag)
    return RoundTripResult(AudioBuffer(aligned, audio.sample_rate), len(decoded), lag)


def codec_roundtrip(audio: AudioBuffer, spec: CodecSpec, workdir=None) -> AudioBuffer:
    """Encode at ``spec.bitrate_kbps``, decode, and realign to the input length.

    Temporary files live in a private directory under ``workdir`` (the system
    temp directory by default) and are removed on success and on failure.

    Raises:
        EncoderUnavailableError: the transcoder binary cannot be started.
        SubprocessFailedError: encoder or decoder exited non-zero.
        OutputUnreadableError: decoded WAV missing or unparsable.
        SampleRateChangedError: decoded rate differs from the input rate.
    """
    return codec_roundtrip_detail(audio, spec, workdir).audio
