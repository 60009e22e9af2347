"""Render one seeded mask plan per shape over a speech-like spectrogram.

Writes a 2x2 PNG figure of log magnitudes after masking. Needs matplotlib
(``pip install -e .[scripts]``).

    python scripts/plot_mask_shapes.py --seed 3 -o masks.png
"""

import argparse

import numpy as np

from spoofaug.audio_io import AudioBuffer
from spoofaug.masking import MaskParams, MaskShape, apply_mask_spectrogram, generate_mask_plan
from spoofaug.stft import StftConfig, compute_stft, stft_mean


def synthetic_utterance(rate=16000, seconds=2.0, seed=0):
    """Harmonic stack with a gliding pitch plus a little noise."""
    rng = np.random.default_rng(seed)
    t = np.arange(int(rate * seconds)) / rate
    f0 = 120 + 40 * np.sin(2 * np.pi * 0.7 * t)
    phase = 2 * np.pi * np.cumsum(f0) / rate
    x = sum(np.sin(h * phase) / h for h in range(1, 25))
    x = x * (0.6 + 0.4 * np.sin(2 * np.pi * 1.5 * t) ** 2)
    x += 0.01 * rng.standard_normal(len(t))
    return AudioBuffer(0.3 * x / np.max(np.abs(x)), rate)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("-o", "--output", default="mask_shapes.png")
    args = parser.parse_args()

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    spec = compute_stft(synthetic_utterance(), StftConfig(512, 128))
    mu = stft_mean(spec)
    fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True, sharey=True)
    for ax, shape in zip(axes.ravel(), MaskShape):
        plan = generate_mask_plan(MaskParams.defaults(shape), spec.shape, np.random.default_rng(args.seed))
        masked = apply_mask_spectrogram(spec, plan, mu)
        ax.imshow(20 * np.log10(np.abs(masked.bins.T) + 1e-6), origin="lower", aspect="auto",
                  cmap="magma", vmin=-60)
        ax.set_title(f"{shape.value} ({len(plan.patches)} patches)")
    for ax in axes[1]:
        ax.set_xlabel("frame")
    for ax in axes[:, 0]:
        ax.set_ylabel("bin")
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
