import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spoofaug.errors import (
    DegenerateSetError,
    DuplicateUttIdError,
    LabelConflictError,
    MissingTagError,
    NonPositiveWeightError,
    ParseError,
    UniverseMismatchError,
    UnknownLabelError,
)
from spoofaug.metrics import (
    EerResult,
    EvaluationBundle,
    Label,
    ScoreRecord,
    ScoreSet,
    compute_eer,
    fuse_score_sets,
    load_scores,
    pooled_eer,
    save_scores,
    write_report,
)

HEADER = "utt_id\tlabel\tscore\tattack\tcodec\n"


def brute_force_eer(bonafide, spoof):
    """Try every threshold with exact rationals; same selection rule, no shared code."""
    candidates = [float("-inf")] + sorted(set(bonafide) | set(spoof)) + [float("inf")]
    best = None
    for th in candidates:
        far = Fraction(sum(1 for s in spoof if s >= th), len(spoof))
        frr = Fraction(sum(1 for b in bonafide if b < th), len(bonafide))
        key = (abs(far - frr), far + frr, th)
        if best is None or key < best[0]:
            best = (key, (far + frr) / 2, th)
    return float(best[1]), best[2]


def write_tsv(path, rows):
    path.write_text(HEADER + "".join("\t".join(map(str, r)) + "\n" for r in rows))
    return path


def test_perfect_separation():
    assert compute_eer(ScoreSet.from_arrays([0.9, 0.8], [0.2, 0.1])).eer == 0.0


def test_hand_case_one_third():
    res = compute_eer(ScoreSet.from_arrays([0.9, 0.8, 0.4], [0.7, 0.3, 0.2]))
    assert res.eer == 1 / 3
    assert 0.4 < res.threshold <= 0.7


def test_fully_inverted():
    assert compute_eer(ScoreSet.from_arrays([0.1, 0.2], [0.8, 0.9])).eer == 1.0


def test_degenerate():
    with pytest.raises(DegenerateSetError):
        compute_eer(ScoreSet.from_arrays([0.5], []))


def test_randomized_oracle_equivalence():
    rnd = random.Random(20240)
    for _ in range(200):
        n = rnd.randint(2, 50)
        nb = rnd.randint(1, n - 1)
        pool = [round(rnd.uniform(-3, 3), rnd.choice([1, 2, 6])) for _ in range(n)]
        bona, spoof = pool[:nb], pool[nb:]
        res = compute_eer(ScoreSet.from_arrays(bona, spoof))
        eer, th = brute_force_eer(bona, spoof)
        assert abs(res.eer - eer) <= 1e-12
        assert res.threshold == th


grid_scores = st.lists(st.integers(-64, 64).map(lambda v: v / 16), min_size=1, max_size=25)


@settings(max_examples=200, deadline=None)
@given(grid_scores, grid_scores)
def test_oracle_property(bona, spoof):
    res = compute_eer(ScoreSet.from_arrays(bona, spoof))
    eer, _ = brute_force_eer(bona, spoof)
    assert abs(res.eer - eer) <= 1e-12
    assert 0 <= res.eer <= 1


@settings(max_examples=100, deadline=None)
@given(grid_scores, grid_scores)
def test_monotone_invariance(bona, spoof):
    base = compute_eer(ScoreSet.from_arrays(bona, spoof)).eer
    for f in (lambda v: 3 * v + 7, np.exp, lambda v: v ** 3):
        assert compute_eer(ScoreSet.from_arrays([f(v) for v in bona], [f(v) for v in spoof])).eer == base


@settings(max_examples=100, deadline=None)
@given(grid_scores, grid_scores)
def test_strict_separation_is_zero(bona, spoof):
    lo = min(bona)
    spoof = [s for s in spoof if s < lo] or [lo - 1]
    assert compute_eer(ScoreSet.from_arrays(bona, spoof)).eer == 0.0


# --- score files -------------------------------------------------------------


def test_load_two_lines(tmp_path):
    p = write_tsv(tmp_path / "s.tsv", [("u1", "bonafide", 0.5, "-", "-"), ("u2", "spoof", -1.5, "A17", "C3")])
    s = load_scores(p)
    assert len(s) == 2
    assert s.records[0] == ScoreRecord("u1", Label.BONAFIDE, 0.5)
    assert (s.records[1].attack, s.records[1].codec) == ("A17", "C3")


def test_unknown_label(tmp_path):
    p = write_tsv(tmp_path / "s.tsv", [("u1", "genuine", 0.5, "-", "-")])
    with pytest.raises(UnknownLabelError) as info:
        load_scores(p)
    assert info.value.line == 2


def test_duplicate_utt(tmp_path):
    p = write_tsv(tmp_path / "s.tsv", [("u1", "spoof", 0.5, "-", "-"), ("u2", "spoof", 0.1, "-", "-"),
                                       ("u1", "spoof", 0.2, "-", "-")])
    with pytest.raises(DuplicateUttIdError) as info:
        load_scores(p)
    assert info.value.lines == (2, 4)


@pytest.mark.parametrize("line", ["u1\tspoof\tabc\t-\t-", "u1\tspoof\t0.1\t-", "u1\tspoof\tnan\t-\t-"])
def test_parse_errors(tmp_path, line):
    p = tmp_path / "s.tsv"
    p.write_text(HEADER + line + "\n")
    with pytest.raises(ParseError) as info:
        load_scores(p)
    assert info.value.line == 2


def test_bad_header(tmp_path):
    p = tmp_path / "s.tsv"
    p.write_text("id label score\n")
    with pytest.raises(ParseError):
        load_scores(p)


def test_save_load_roundtrip(tmp_path):
    s = ScoreSet((ScoreRecord("a", "bonafide", 0.1 + 0.2, None, "None"),
                  ScoreRecord("b", "spoof", -3.25, "A20", None)))
    save_scores(s, tmp_path / "o.tsv")
    assert load_scores(tmp_path / "o.tsv") == s


# --- fusion ------------------------------------------------------------------


def _set(pairs, attack=None):
    return ScoreSet(tuple(ScoreRecord(u, lab, sc, attack) for u, lab, sc in pairs))


def test_self_fusion_preserves_eer():
    rng = np.random.default_rng(0)
    s = ScoreSet.from_arrays(rng.normal(1, 1, 40).round(3), rng.normal(0, 1, 60).round(3))
    assert compute_eer(fuse_score_sets([s, s])).eer == compute_eer(s).eer
    assert compute_eer(fuse_score_sets([s])).eer == compute_eer(s).eer


def test_weighted_mean_by_hand():
    a = _set([("x", "bonafide", 0.0), ("u", "spoof", 0.2), ("y", "spoof", 1.0)])
    b = _set([("x", "bonafide", 10.0), ("u", "spoof", 16.0), ("y", "spoof", 20.0)])
    fused = fuse_score_sets([a, b]).by_id()
    assert fused["u"].score == pytest.approx(0.4, abs=1e-15)
    fused_w = fuse_score_sets([a, b], [3.0, 1.0]).by_id()
    assert fused_w["u"].score == pytest.approx((3 * 0.2 + 0.6) / 4, abs=1e-15)


def test_fusion_errors():
    a = _set([("x", "bonafide", 0.0), ("y", "spoof", 1.0)])
    b = _set([("x", "bonafide", 0.0), ("z", "spoof", 1.0)])
    c = _set([("x", "spoof", 0.0), ("y", "spoof", 1.0)])
    with pytest.raises(UniverseMismatchError):
        fuse_score_sets([a, b])
    with pytest.raises(LabelConflictError):
        fuse_score_sets([a, c])
    with pytest.raises(NonPositiveWeightError):
        fuse_score_sets([a, a], [1.0, 0.0])


@settings(max_examples=100, deadline=None)
@given(grid_scores, grid_scores)
def test_single_set_fusion_property(bona, spoof):
    s = ScoreSet.from_arrays(bona, spoof)
    assert compute_eer(fuse_score_sets([s])).eer == compute_eer(s).eer
    assert compute_eer(fuse_score_sets([s, s, s])).eer == compute_eer(s).eer


# --- pooled ------------------------------------------------------------------


def two_attack_fixture():
    recs = [ScoreRecord(f"b{i}", "bonafide", v) for i, v in enumerate([0.5, 0.6, 0.7])]
    recs += [ScoreRecord(f"a{i}", "spoof", v, "A") for i, v in enumerate([0.1, 0.2])]
    recs += [ScoreRecord(f"c{i}", "spoof", v, "B") for i, v in enumerate([0.9, 0.95])]
    return ScoreSet(tuple(recs))


def test_pooled_two_attacks():
    table = pooled_eer(two_attack_fixture(), "attack")
    assert list(table) == ["A", "B"]
    assert table["A"].eer == 0.0 and table["B"].eer == 1.0


def test_pooled_single_attack_equals_overall():
    s = ScoreSet.from_arrays([0.9, 0.3, 0.5], [0.4, 0.2, 0.6])
    s = ScoreSet(tuple(ScoreRecord(r.utt_id, r.label, r.score, "A17" if r.label is Label.SPOOF else None)
                       for r in s.records))
    assert pooled_eer(s, "attack") == {"A17": compute_eer(s)}


def test_pooled_codec_restricts_bonafide():
    recs = [
        ScoreRecord("b1", "bonafide", 0.9, None, "C1"),
        ScoreRecord("b2", "bonafide", 0.1, None, "C2"),
        ScoreRecord("s1", "spoof", 0.5, "A1", "C1"),
        ScoreRecord("s2", "spoof", 0.5, "A1", "C2"),
    ]
    s = ScoreSet(tuple(recs))
    table = pooled_eer(s, "codec")
    # C1: bona 0.9 vs spoof 0.5 separable; C2: bona 0.1 vs spoof 0.5 inverted
    assert table["C1"].eer == 0.0 and table["C2"].eer == 1.0
    # pooling all bona fide instead would mix the two conditions
    mixed = compute_eer(ScoreSet.from_arrays([0.9, 0.1], [0.5])).eer
    assert mixed == brute_force_eer([0.9, 0.1], [0.5])[0] == 0.25


def test_pooled_undefined_and_missing():
    recs = [ScoreRecord("b1", "bonafide", 0.9, None, "C9"), ScoreRecord("s1", "spoof", 0.1, "A1", "C1"),
            ScoreRecord("b2", "bonafide", 0.8, None, "C1")]
    table = pooled_eer(ScoreSet(tuple(recs)), "codec")
    assert table["C9"] is None and table["C1"].eer == 0.0
    with pytest.raises(MissingTagError):
        pooled_eer(ScoreSet.from_arrays([1.0], [0.0]), "attack")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["bonafide", "spoof"]), st.integers(-20, 20),
                          st.sampled_from(["A1", "A2", "A3"])), min_size=2, max_size=40))
def test_pooled_rows_match_restricted_eer(rows):
    recs = tuple(ScoreRecord(f"u{i}", lab, sc / 4, att if lab == "spoof" else None)
                 for i, (lab, sc, att) in enumerate(rows))
    s = ScoreSet(recs)
    if not any(r.attack for r in recs):
        return
    bona = [r.score for r in recs if r.label is Label.BONAFIDE]
    for tag, res in pooled_eer(s, "attack").items():
        spoof = [r.score for r in recs if r.attack == tag]
        if not bona:
            assert res is None
        else:
            assert res.eer == pytest.approx(brute_force_eer(bona, spoof)[0], abs=1e-12)


# --- report ------------------------------------------------------------------


def test_report_keys_and_stability(tmp_path):
    bundle = EvaluationBundle(EerResult(0.125, 0.3))
    write_report(bundle, tmp_path / "a.json")
    write_report(bundle, tmp_path / "b.json")
    a = (tmp_path / "a.json").read_bytes()
    assert a == (tmp_path / "b.json").read_bytes()
    doc = json.loads(a)
    assert doc["eer"] == 0.125 and doc["threshold"] == 0.3


def test_report_sixteen_attacks(tmp_path):
    recs = [ScoreRecord(f"b{i}", "bonafide", 1.0 + i) for i in range(5)]
    attacks = [f"A{n}" for n in range(17, 33)]
    recs += [ScoreRecord(f"s{a}", "spoof", 0.0, a) for a in attacks]
    s = ScoreSet(tuple(recs))
    bundle = EvaluationBundle(compute_eer(s), pooled_by_attack=pooled_eer(s, "attack"),
                              provenance={"seed": 1})
    write_report(bundle, tmp_path / "r.json")
    text = (tmp_path / "r.json").read_text()
    doc = json.loads(text)
    assert len(doc["pooled_by_attack"]) == 16
    assert text == json.dumps(doc, indent=2, sort_keys=True) + "\n"


def test_report_infinite_threshold(tmp_path):
    write_report(EvaluationBundle(EerResult(1.0, float("inf"))), tmp_path / "i.json")
    assert json.loads((tmp_path / "i.json").read_text())["threshold"] == "inf"
