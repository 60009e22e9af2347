"""Feature matrices: binary/CSV I/O, min-max normalisation and MaskedFeature."""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ShapeError
from .masking import MaskParams, MaskPlan, apply_mask_features, generate_mask_plan

MAGIC = b"SAFM"
VERSION = 1
# magic, version u16, reserved u16, T u32, D u32
_HEADER = struct.Struct("<4sHHII")


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """T x D real matrix of latent features (rows are time steps)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ShapeError(f"feature matrix must be 2-D with T, D >= 1, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("feature values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def save_features(features: FeatureMatrix, path) -> None:
    """Write the ``.safm`` binary format (values stored as little-endian float32)."""
    t, d = features.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, 0, t, d))
        fh.write(features.values.astype("<f4").tobytes(order="C"))


def load_features(path) -> FeatureMatrix:
    """Read a ``.safm`` file, or a CSV file when the extension is ``.csv``."""
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    if path.lower().endswith(".csv"):
        return load_features_csv(path)
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: file shorter than the {_HEADER.size}-byte header")
    magic, version, _reserved, t, d = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    payload = blob[_HEADER.size:]
    if len(payload) != 4 * t * d:
        raise ShapeError(
            f"{path}: header declares {t}x{d} values but payload holds {len(payload) / 4:g}"
        )
    values = np.frombuffer(payload, dtype="<f4").reshape(t, d)
    return FeatureMatrix(values)


def load_features_csv(path) -> FeatureMatrix:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise ShapeError(f"{path}: no rows")
    if len({len(r) for r in rows}) != 1:
        raise ShapeError(f"{path}: ragged rows")
    return FeatureMatrix(np.array(rows))


def save_features_csv(features: FeatureMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in features.values:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def normalize_features(features: FeatureMatrix, per_dimension: bool = False) -> FeatureMatrix:
    """Affine min-max map onto [-1, 1].

    By default one min/max pair is taken over the whole matrix. A zero range
    maps to all zeros. With ``per_dimension`` each column is scaled on its own.
    """
    x = features.values
    axis = 0 if per_dimension else None
    lo = x.min(axis=axis, keepdims=True)
    hi = x.max(axis=axis, keepdims=True)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    out = np.where(span > 0, 2.0 * (x - lo) / safe - 1.0, 0.0)
    return FeatureMatrix(out)


def masked_feature_with_plan(features: FeatureMatrix, params: MaskParams,
                             rng: np.random.Generator) -> tuple[FeatureMatrix, MaskPlan, float]:
    fill = float(np.mean(features.values))
    plan = generate_mask_plan(params, features.shape, rng)
    return apply_mask_features(features, plan, fill), plan, fill


def masked_feature_augment(features: FeatureMatrix, params: MaskParams,
                           rng: np.random.Generator) -> FeatureMatrix:
    """MaskedFeature: occlude random regions with the global mean of the matrix."""
    return masked_feature_with_plan(features, params, rng)[0]
