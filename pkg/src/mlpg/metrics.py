"""Evaluation metrics: accuracy, precision-recall AUC, candidate-count
breakdown, naming exact match and subtoken F1, cosine neighbors."""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np


class EmptyEval(Exception):
    pass


CANDIDATE_BUCKETS = ("2", "3", "4", "5", "6-7", "8+")


def candidate_bucket(k):
    if k <= 5:
        return str(k)
    if k <= 7:
        return "6-7"
    return "8+"


def accuracy(correct_flags):
    flags = list(correct_flags)
    if not flags:
        raise EmptyEval("no predictions")
    return sum(flags) / len(flags)


def pr_curve(confidences, correct_flags):
    """Precision-recall points over descending confidence thresholds.

    A prediction is positive-class when it is correct; the confidence is
    the model's top softmax probability. Returns a list of (recall,
    precision, threshold), starting at the implicit (0, 1) anchor.
    """
    conf = np.asarray(confidences, dtype=float)
    correct = np.asarray(correct_flags, dtype=bool)
    if conf.size == 0:
        raise EmptyEval("no predictions")
    order = np.argsort(-conf, kind="stable")
    conf, correct = conf[order], correct[order]
    total_pos = int(correct.sum())
    points = [(0.0, 1.0, float("inf"))]
    tp = 0
    i = 0
    n = conf.size
    while i < n:
        j = i
        while j < n and conf[j] == conf[i]:
            tp += int(correct[j])
            j += 1
        precision = tp / j
        recall = tp / total_pos if total_pos else 0.0
        points.append((recall, precision, float(conf[i])))
        i = j
    return points


def pr_auc(confidences, correct_flags):
    pts = pr_curve(confidences, correct_flags)
    area = 0.0
    for (r0, p0, _), (r1, p1, _) in zip(pts, pts[1:]):
        area += (r1 - r0) * (p1 + p0) / 2.0
    return area


def bucketed_accuracy(correct_flags, candidate_counts):
    by_bucket = {}
    for ok, k in zip(correct_flags, candidate_counts):
        by_bucket.setdefault(candidate_bucket(k), []).append(ok)
    return {b: accuracy(v) for b, v in by_bucket.items()}


@dataclass
class MisuseReport:
    accuracy: float
    pr_auc: float
    per_bucket: dict
    curve: list = field(repr=False, default_factory=list)
    count: int = 0

    def to_dict(self):
        return {"accuracy": self.accuracy, "pr_auc": self.pr_auc,
                "per_bucket": self.per_bucket, "count": self.count}


def misuse_report(pred_indices, confidences, gold_indices, candidate_counts):
    preds = list(pred_indices)
    if not preds:
        raise EmptyEval("no predictions")
    correct = [p == g for p, g in zip(preds, gold_indices)]
    return MisuseReport(
        accuracy=accuracy(correct),
        pr_auc=pr_auc(confidences, correct),
        per_bucket=bucketed_accuracy(correct, candidate_counts),
        curve=pr_curve(confidences, correct),
        count=len(preds),
    )


def subtoken_f1(predicted_seqs, gold_seqs):
    """Micro-averaged F1 over multiset overlap of subtokens."""
    tp = pred_total = gold_total = 0
    empty = True
    for pred, gold in zip(predicted_seqs, gold_seqs):
        empty = False
        pc, gc = Counter(pred), Counter(gold)
        tp += sum((pc & gc).values())
        pred_total += len(pred)
        gold_total += len(gold)
    if empty:
        raise EmptyEval("no predictions")
    precision = tp / pred_total if pred_total else 0.0
    recall = tp / gold_total if gold_total else 0.0
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass
class NamingReport:
    accuracy: float
    f1: float
    count: int = 0

    def to_dict(self):
        return {"accuracy": self.accuracy, "f1": self.f1, "count": self.count}


def naming_report(predicted_seqs, gold_seqs):
    preds = [list(p) for p in predicted_seqs]
    golds = [list(g) for g in gold_seqs]
    if not preds:
        raise EmptyEval("no predictions")
    exact = [p == g for p, g in zip(preds, golds)]
    return NamingReport(accuracy=accuracy(exact),
                        f1=subtoken_f1(preds, golds), count=len(preds))


def nearest_neighbors(representations, query_id, k=5):
    """Top-k ids by cosine similarity to the query row, excluding the query
    itself; ties broken by ascending id."""
    reps = np.asarray(representations, dtype=float)
    q = reps[query_id]
    norms = np.linalg.norm(reps, axis=1) * np.linalg.norm(q)
    norms[norms == 0] = 1.0
    sims = reps @ q / norms
    order = sorted((i for i in range(len(reps)) if i != query_id),
                   key=lambda i: (-sims[i], i))
    return [(i, float(sims[i])) for i in order[:k]]
