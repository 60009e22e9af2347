"""Score files, equal error rate, score fusion and pooled per-group EER."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateSetError,
    DuplicateUttIdError,
    LabelConflictError,
    MissingTagError,
    NonPositiveWeightError,
    ParseError,
    UniverseMismatchError,
    UnknownLabelError,
)

TSV_HEADER = ("utt_id", "label", "score", "attack", "codec")
ABSENT = "-"


class Label(str, enum.Enum):
    BONAFIDE = "bonafide"
    SPOOF = "spoof"


@dataclass(frozen=True)
class ScoreRecord:
    utt_id: str
    label: Label
    score: float
    attack: str | None = None
    codec: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "label", Label(self.label))
        object.__setattr__(self, "score", float(self.score))
        if not self.utt_id:
            raise ValueError("utt_id must be non-empty")
        if not math.isfinite(self.score):
            raise ValueError(f"score for {self.utt_id!r} is not finite")


@dataclass(frozen=True)
class ScoreSet:
    records: tuple[ScoreRecord, ...]

    def __post_init__(self):
        records = tuple(self.records)
        seen = set()
        for r in records:
            if r.utt_id in seen:
                raise DuplicateUttIdError(r.utt_id, None, None)
            seen.add(r.utt_id)
        object.__setattr__(self, "records", records)

    @classmethod
    def from_arrays(cls, bonafide: Iterable[float], spoof: Iterable[float]) -> "ScoreSet":
        recs = [ScoreRecord(f"b{i}", Label.BONAFIDE, s) for i, s in enumerate(bonafide)]
        recs += [ScoreRecord(f"s{i}", Label.SPOOF, s) for i, s in enumerate(spoof)]
        return cls(tuple(recs))

    def __len__(self):
        return len(self.records)

    def scores(self, label: Label) -> np.ndarray:
        return np.array([r.score for r in self.records if r.label is label], dtype=np.float64)

    def by_id(self) -> dict[str, ScoreRecord]:
        return {r.utt_id: r for r in self.records}


@dataclass(frozen=True)
class EerResult:
    eer: float
    threshold: float
    far: float = field(default=math.nan, compare=False)
    frr: float = field(default=math.nan, compare=False)

    def to_dict(self) -> dict:
        return {"eer": self.eer, "threshold": _json_float(self.threshold)}


def _json_float(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _tag(field_value: str) -> str | None:
    return None if field_value == ABSENT else field_value


def load_scores(path) -> ScoreSet:
    """Parse a score TSV with header ``utt_id label score attack codec``.

    ``-`` marks an absent attack or codec tag.

    Raises:
        ParseError: malformed header or line (carries the 1-based line number).
        UnknownLabelError: a label other than ``bonafide`` or ``spoof``.
        DuplicateUttIdError: an utt_id appears twice.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines or tuple(lines[0].rstrip("\r").split("\t")) != TSV_HEADER:
        raise ParseError("expected tab-separated header: " + " ".join(TSV_HEADER), line=1)
    records = []
    first_line: dict[str, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != len(TSV_HEADER):
            raise ParseError(f"expected {len(TSV_HEADER)} tab-separated fields, got {len(parts)}", line=lineno)
        utt_id, label, score, attack, codec = parts
        if not utt_id:
            raise ParseError("empty utt_id", line=lineno)
        if label not in (Label.BONAFIDE.value, Label.SPOOF.value):
            raise UnknownLabelError(f"unknown label {label!r}", line=lineno)
        try:
            value = float(score)
        except ValueError:
            raise ParseError(f"score {score!r} is not a number", line=lineno) from None
        if not math.isfinite(value):
            raise ParseError(f"score {score!r} is not finite", line=lineno)
        if utt_id in first_line:
            raise DuplicateUttIdError(utt_id, first_line[utt_id], lineno)
        first_line[utt_id] = lineno
        records.append(ScoreRecord(utt_id, Label(label), value, _tag(attack), _tag(codec)))
    return ScoreSet(tuple(records))


def save_scores(scores: ScoreSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(TSV_HEADER) + "\n")
        for r in scores.records:
            fh.write("\t".join((r.utt_id, r.label.value, repr(r.score),
                                r.attack or ABSENT, r.codec or ABSENT)) + "\n")


def eer_from_arrays(bonafide: np.ndarray, spoof: np.ndarray) -> EerResult:
    """EER by sweeping every distinct score plus -inf/+inf as threshold.

    A trial is accepted as bona fide when ``score >= threshold``. The chosen
    threshold minimises |FAR - FRR|; ties go to the smaller FAR + FRR, then to
    the smaller threshold. The EER is the FAR/FRR midpoint there.
    """
    bonafide = np.asarray(bonafide, dtype=np.float64)
    spoof = np.asarray(spoof, dtype=np.float64)
    n_b, n_s = len(bonafide), len(spoof)
    if n_b == 0 or n_s == 0:
        raise DegenerateSetError(f"EER needs both classes (bonafide={n_b}, spoof={n_s})")
    thresholds = np.concatenate([[-np.inf], np.unique(np.concatenate([bonafide, spoof])), [np.inf]])
    b_sorted = np.sort(bonafide)
    s_sorted = np.sort(spoof)
    # counts of scores strictly below each threshold
    rejected_b = np.searchsorted(b_sorted, thresholds, side="left")
    accepted_s = n_s - np.searchsorted(s_sorted, thresholds, side="left")
    # integer criteria, scaled by n_b * n_s, so ties are detected exactly
    diff = np.abs(accepted_s * n_b - rejected_b * n_s)
    total = accepted_s * n_b + rejected_b * n_s
    order = np.lexsort((thresholds, total, diff))
    i = int(order[0])
    far = int(accepted_s[i]) / n_s
    frr = int(rejected_b[i]) / n_b
    return EerResult((far + frr) / 2.0, float(thresholds[i]), far, frr)


def compute_eer(scores: ScoreSet) -> EerResult:
    return eer_from_arrays(scores.scores(Label.BONAFIDE), scores.scores(Label.SPOOF))


def _minmax(values: np.ndarray) -> np.ndarray:
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.full_like(values, 0.5)
    return (values - lo) / (hi - lo)


def fuse_score_sets(sets: Sequence[ScoreSet], weights: Sequence[float] | None = None) -> ScoreSet:
    """Weighted mean of per-set min-max normalised scores.

    Every set must cover the same utt_ids with the same labels and tags. The
    fused set keeps the record order of the first set. A set whose scores are
    all equal normalises to 0.5.
    """
    if not sets:
        raise ValueError("nothing to fuse")
    if weights is None:
        weights = [1.0] * len(sets)
    if len(weights) != len(sets):
        raise ValueError(f"{len(weights)} weights given for {len(sets)} score sets")
    for w in weights:
        if not (w > 0) or not math.isfinite(w):
            raise NonPositiveWeightError(f"fusion weights must be positive, got {w}")

    base = sets[0]
    ids = [r.utt_id for r in base.records]
    universe = set(ids)
    columns = []
    for j, s in enumerate(sets):
        lookup = s.by_id()
        if set(lookup) != universe:
            only_here = sorted(set(lookup) - universe)[:3]
            only_base = sorted(universe - set(lookup))[:3]
            raise UniverseMismatchError(
                f"score set {j} differs from set 0: extra {only_here}, missing {only_base}"
            )
        for r in base.records:
            o = lookup[r.utt_id]
            if (o.label, o.attack, o.codec) != (r.label, r.attack, r.codec):
                raise LabelConflictError(f"utt {r.utt_id!r} has conflicting label/tags in set {j}")
        columns.append(_minmax(np.array([lookup[u].score for u in ids])))

    w = np.asarray(weights, dtype=np.float64)
    fused = sum(wj * col for wj, col in zip(w, columns)) / w.sum()
    return ScoreSet(tuple(replace(r, score=float(v)) for r, v in zip(base.records, fused)))


class GroupBy(str, enum.Enum):
    ATTACK = "attack"
    CODEC = "codec"


def pooled_eer(scores: ScoreSet, group_by) -> dict[str, EerResult | None]:
    """EER per attack or per codec tag, in lexicographic tag order.

    Attack pools compare all bona fide trials against the spoofs of one
    attack. Codec pools restrict both classes to one codec. A pool missing
    either class maps to ``None``.
    """
    group_by = GroupBy(group_by)
    key = group_by.value
    tags = sorted({getattr(r, key) for r in scores.records if getattr(r, key) is not None})
    if not tags:
        raise MissingTagError(f"no record carries a {key} tag")
    table: dict[str, EerResult | None] = {}
    for tag in tags:
        if group_by is GroupBy.ATTACK:
            bona = [r.score for r in scores.records if r.label is Label.BONAFIDE]
        else:
            bona = [r.score for r in scores.records if r.label is Label.BONAFIDE and r.codec == tag]
        spoof = [r.score for r in scores.records if r.label is Label.SPOOF and getattr(r, key) == tag]
        table[tag] = eer_from_arrays(bona, spoof) if bona and spoof else None
    return table


@dataclass
class EvaluationBundle:
    """Everything that goes into a JSON evaluation report."""

    overall: EerResult
    pooled_by_attack: Mapping[str, EerResult | None] | None = None
    pooled_by_codec: Mapping[str, EerResult | None] | None = None
    fusion: Mapping | None = None
    provenance: Mapping = field(default_factory=dict)

    def to_dict(self) -> dict:
        def table(t):
            if t is None:
                return None
            return {k: (v.to_dict() if v is not None else None) for k, v in t.items()}

        doc = self.overall.to_dict()
        doc["pooled_by_attack"] = table(self.pooled_by_attack)
        doc["pooled_by_codec"] = table(self.pooled_by_codec)
        doc["fusion"] = dict(self.fusion) if self.fusion is not None else None
        doc["provenance"] = dict(self.provenance)
        return doc


def write_report(bundle: EvaluationBundle, path) -> None:
    """Serialise with sorted keys and 2-space indent so identical bundles give identical bytes."""
    text = json.dumps(bundle.to_dict(), indent=2, sort_keys=True, allow_nan=False)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")
