"""Write a small synthetic WAV corpus and a matching pipeline config.

The corpus mimics a speaker/utterance tree of 16 kHz mono files. The config
points at it with the default stage order, so the pipeline can be tried
end to end:

    python scripts/make_demo_corpus.py demo
    spoofaug augment --config demo/augment.toml --emit-provenance
"""

import argparse
from pathlib import Path

import numpy as np

from spoofaug.audio_io import AudioBuffer, write_wav

CONFIG = """\
mode = "audio"
master_seed = {seed}
parallelism = 2

[io]
input_dir = "wav"
output_dir = "wav_aug"

[[stages]]
type = "codec"
probability = {codec_p}
  [[stages.choices]]
  codec = "mp3"
  bitrate_kbps = 16

[[stages]]
type = "lpf"
probability = 0.5

[[stages]]
type = "masked_spec"
probability = 0.5
shape = "squares"
"""


def utterance(rng, rate, seconds):
    t = np.arange(int(rate * seconds)) / rate
    f0 = rng.uniform(90, 220) * (1 + 0.1 * np.sin(2 * np.pi * rng.uniform(0.3, 1.5) * t))
    phase = 2 * np.pi * np.cumsum(f0) / rate
    x = sum(np.sin(h * phase) * np.exp(-h / 8) for h in range(1, 30))
    x += 0.02 * rng.standard_normal(len(t))
    return 0.3 * x / np.max(np.abs(x))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("root", type=Path)
    parser.add_argument("--speakers", type=int, default=3)
    parser.add_argument("--per-speaker", type=int, default=4)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--no-codec", action="store_true", help="set the codec stage probability to 0")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    rate = 16000
    for s in range(args.speakers):
        spk = args.root / "wav" / f"spk{s:02d}"
        spk.mkdir(parents=True, exist_ok=True)
        for u in range(args.per_speaker):
            write_wav(AudioBuffer(utterance(rng, rate, rng.uniform(1.0, 3.0)), rate), spk / f"utt{u:03d}.wav")
    (args.root / "augment.toml").write_text(
        CONFIG.format(seed=args.seed, codec_p=0.0 if args.no_codec else 0.3))
    print(f"wrote {args.speakers * args.per_speaker} files under {args.root / 'wav'}")
    print(f"run: spoofaug augment --config {args.root / 'augment.toml'}")


if __name__ == "__main__":
    main()
