"""Tabulate the magnitude response of the windowed-sinc low-pass kernels.

Prints gain in dB at a few normalised frequencies for a sweep of cutoffs and
tap counts, plus the measured -6 dB point. Pure numpy.

    python scripts/lpf_response.py --taps 51 101 201
"""

import argparse

import numpy as np

from spoofaug.filters import design_lpf_kernel


def response_db(taps, n_fft=1 << 15):
    mag = np.abs(np.fft.rfft(taps, n_fft))
    return np.fft.rfftfreq(n_fft), 20 * np.log10(np.maximum(mag, 1e-12))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cutoffs", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.4])
    parser.add_argument("--taps", type=int, nargs="+", default=[101])
    parser.add_argument("--rate", type=int, default=16000, help="only used to print cutoffs in Hz")
    args = parser.parse_args()

    print(f"{'taps':>5} {'fc':>5} {'Hz':>6} {'DC':>7} {'fc/2':>7} {'fc':>7} {'-6dB at':>8} {'fc+0.05':>8} {'0.45':>8}")
    for m in args.taps:
        for fc in args.cutoffs:
            freqs, db = response_db(design_lpf_kernel(fc, m).taps)

            def at(f):
                return db[np.argmin(np.abs(freqs - f))]

            half = freqs[np.argmax(db < -6.0206)]
            print(f"{m:>5} {fc:>5.2f} {fc * args.rate:>6.0f} {at(0):>7.2f} {at(fc / 2):>7.2f} {at(fc):>7.2f} "
                  f"{half:>8.4f} {at(min(fc + 0.05, 0.5)):>8.1f} {at(0.45):>8.1f}")


if __name__ == "__main__":
    main()
