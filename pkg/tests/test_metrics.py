import numpy as np
import pytest

from mlpg.metrics import (accuracy, pr_curve, pr_auc, candidate_bucket,
                          bucketed_accuracy, misuse_report, subtoken_f1,
                          naming_report, nearest_neighbors, EmptyEval,
                          CANDIDATE_BUCKETS)

from oracles import brute_force_pr_auc, brute_force_subtoken_f1


# --- hand-worked ten-item misuse set ------------------------------------------------

PRED = [0, 1, 2, 0, 3, 1, 0, 2, 1, 0]
GOLD = [0, 1, 0, 0, 3, 2, 0, 2, 0, 1]   # 6 correct
CONF = [0.9, 0.8, 0.7, 0.9, 0.6, 0.5, 0.95, 0.4, 0.55, 0.3]
KCNT = [2, 3, 4, 2, 5, 6, 2, 8, 3, 4]


def test_accuracy_hand_set():
    correct = [p == g for p, g in zip(PRED, GOLD)]
    assert accuracy(correct) == pytest.approx(0.6)


def test_accuracy_all_correct_and_empty():
    assert accuracy([True] * 4 == [True] * 4 and [True] * 4) == 1.0
    with pytest.raises(EmptyEval):
        accuracy([])


def test_pr_curve_anchor_and_monotone_recall():
    correct = [p == g for p, g in zip(PRED, GOLD)]
    pts = pr_curve(CONF, correct)
    assert pts[0] == (0.0, 1.0, float("inf"))
    recalls = [r for r, _, _ in pts]
    assert recalls == sorted(recalls)
    assert recalls[-1] == pytest.approx(1.0)
    # thresholds strictly decreasing after the anchor
    ths = [t for _, _, t in pts[1:]]
    assert ths == sorted(ths, reverse=True) and len(set(ths)) == len(ths)


def test_pr_curve_hand_example():
    # conf: [.9, .8, .7], correct: [T, F, T]
    pts = pr_curve([0.9, 0.8, 0.7], [True, False, True])
    assert pts == [(0.0, 1.0, float("inf")),
                   (0.5, 1.0, 0.9),
                   (0.5, 0.5, 0.8),
                   (1.0, 2 / 3, 0.7)]


def test_pr_curve_groups_ties():
    pts = pr_curve([0.5, 0.5, 0.5], [True, False, True])
    assert pts == [(0.0, 1.0, float("inf")), (1.0, 2 / 3, 0.5)]


def test_pr_auc_all_correct_is_one():
    assert pr_auc([0.9, 0.2, 0.5], [True, True, True]) == pytest.approx(1.0)


def test_pr_auc_matches_brute_force_hand_set():
    correct = [p == g for p, g in zip(PRED, GOLD)]
    assert pr_auc(CONF, correct) == pytest.approx(
        brute_force_pr_auc(CONF, correct), abs=1e-12)


def test_pr_auc_matches_brute_force_random(rng):
    for _ in range(20):
        n = int(rng.integers(3, 40))
        conf = rng.choice([0.1, 0.25, 0.5, 0.75, 0.9], size=n)
        correct = rng.random(n) < 0.6
        if not correct.any():
            correct[0] = True
        assert pr_auc(conf, correct) == pytest.approx(
            brute_force_pr_auc(conf, correct), abs=1e-12)


def test_candidate_buckets():
    assert [candidate_bucket(k) for k in (2, 3, 4, 5, 6, 7, 8, 30)] == \
        ["2", "3", "4", "5", "6-7", "6-7", "8+", "8+"]
    assert set(b for b in map(candidate_bucket, range(2, 40))) == \
        set(CANDIDATE_BUCKETS)


def test_bucketed_accuracy_hand_set():
    correct = [p == g for p, g in zip(PRED, GOLD)]
    got = bucketed_accuracy(correct, KCNT)
    assert got["2"] == pytest.approx(1.0)          # items 0, 3, 6
    assert got["3"] == pytest.approx(0.5)          # items 1, 8
    assert got["4"] == pytest.approx(0.0)          # items 2, 9
    assert got["5"] == pytest.approx(1.0)          # item 4
    assert got["6-7"] == pytest.approx(0.0)        # item 5
    assert got["8+"] == pytest.approx(1.0)         # item 7


def test_misuse_report_combines():
    rep = misuse_report(PRED, CONF, GOLD, KCNT)
    assert rep.accuracy == pytest.approx(0.6)
    assert rep.count == 10
    assert rep.pr_auc == pytest.approx(brute_force_pr_auc(
        CONF, [p == g for p, g in zip(PRED, GOLD)]))
    d = rep.to_dict()
    assert set(d) == {"accuracy", "pr_auc", "per_bucket", "count"}


# --- naming metrics ------------------------------------------------------------------

NAME_PRED = [["input", "stream"], ["total"], ["idx"], ["max", "len"],
             ["count"], [], ["get", "value"], ["node"], ["tmp"], ["result"]]
NAME_GOLD = [["input", "buffer"], ["total"], ["index"], ["max", "len"],
             ["count", "er"], ["size"], ["value"], ["node"], ["tmp", "buf"],
             ["results"]]


def test_subtoken_f1_paper_style_example():
    # one common subtoken, two predicted, two gold -> P = R = F1 = 0.5
    assert subtoken_f1([["input", "stream"]], [["input", "buffer"]]) == \
        pytest.approx(0.5)


def test_subtoken_f1_multiset_not_set():
    # duplicate subtokens only count as many times as they appear in gold
    assert subtoken_f1([["a", "a"]], [["a"]]) == pytest.approx(2 / 3)


def test_naming_report_hand_set():
    rep = naming_report(NAME_PRED, NAME_GOLD)
    assert rep.count == 10
    assert rep.accuracy == pytest.approx(0.3)   # total, max/len, node
    assert rep.f1 == pytest.approx(
        brute_force_subtoken_f1(NAME_PRED, NAME_GOLD), abs=1e-12)


def test_naming_report_all_correct():
    rep = naming_report(NAME_GOLD, NAME_GOLD)
    assert rep.accuracy == 1.0 and rep.f1 == pytest.approx(1.0)


def test_subtoken_f1_matches_brute_force_random(rng):
    alphabet = ["a", "b", "c", "d"]
    for _ in range(20):
        pred = [[alphabet[int(rng.integers(4))]
                 for _ in range(int(rng.integers(0, 4)))] for _ in range(6)]
        gold = [[alphabet[int(rng.integers(4))]
                 for _ in range(int(rng.integers(1, 4)))] for _ in range(6)]
        assert subtoken_f1(pred, gold) == pytest.approx(
            brute_force_subtoken_f1(pred, gold), abs=1e-12)


# --- nearest neighbors ----------------------------------------------------------------

def test_nearest_neighbors_exhaustive(rng):
    reps = rng.standard_normal((12, 6))
    for q in range(12):
        got = nearest_neighbors(reps, q, k=4)
        sims = {}
        for i in range(12):
            if i == q:
                continue
            sims[i] = float(reps[i] @ reps[q] /
                            (np.linalg.norm(reps[i]) * np.linalg.norm(reps[q])))
        expect = sorted(sims, key=lambda i: (-sims[i], i))[:4]
        assert [i for i, _ in got] == expect
        for i, s in got:
            assert s == pytest.approx(sims[i], abs=1e-12)


def test_nearest_neighbors_excludes_self_and_breaks_ties():
    reps = np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [0.0, 1.0]])
    got = nearest_neighbors(reps, 0, k=3)
    assert [i for i, _ in got] == [1, 2, 3]   # equal cosines 1 & 2: lower id first
    assert got[0][1] == pytest.approx(1.0)
    assert got[2][1] == pytest.approx(0.0, abs=1e-12)
