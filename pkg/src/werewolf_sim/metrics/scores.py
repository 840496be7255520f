"""Scalar evaluation metrics. Undefined values are returned as ``None``, never 0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Z95 = 1.96


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: ConfusionCounts) -> ConfusionCounts:
        return ConfusionCounts(self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> ConfusionCounts:
        """``pairs`` of (predicted flag, true label)."""
        tp = tn = fp = fn = 0
        for pred, truth in pairs:
            if pred and truth:
                tp += 1
            elif pred:
                fp += 1
            elif truth:
                fn += 1
            else:
                tn += 1
        return cls(tp, tn, fp, fn)

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float | None:
        return _ratio(self.tp + self.tn, self.total)

    @property
    def precision(self) -> float | None:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float | None:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> float | None:
        # equals the harmonic mean of precision and recall wherever both are defined
        return _ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn)

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def _ratio(num: float, den: float) -> float | None:
    return num / den if den else None


def _split(pairs: Iterable[tuple[float, int]]) -> tuple[np.ndarray, np.ndarray]:
    pairs = list(pairs)
    scores = np.array([float(s) for s, _ in pairs], dtype=float)
    labels = np.array([int(d) for _, d in pairs], dtype=int)
    return scores, labels


def brier(pairs: Iterable[tuple[float, int]]) -> float | None:
    """Mean squared error between suspicion and the 0/1 label."""
    scores, labels = _split(pairs)
    if scores.size == 0:
        return None
    return float(np.mean((scores - labels) ** 2))


def _average_ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ranks = np.empty(x.size, dtype=float)
    # 1-based ranks, ties share the mean of their positions
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ends = np.r_[starts[1:], xs.size]
    for a, b in zip(starts, ends):
        ranks[order[a:b]] = (a + 1 + b) / 2.0
    return ranks


def roc_auc(pairs: Iterable[tuple[float, int]]) -> float | None:
    """Mann-Whitney AUC: P(random positive outscores random negative), ties count 1/2."""
    scores, labels = _split(pairs)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = _average_ranks(scores)
    u = ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def pr_curve(pairs: Iterable[tuple[float, int]]) -> list[tuple[float, float, float]]:
    """(threshold, precision, recall) at every distinct score, thresholds descending."""
    scores, labels = _split(pairs)
    n_pos = int(labels.sum())
    if n_pos == 0:
        return []
    order = np.argsort(-scores, kind="mergesort")
    s, y = scores[order], labels[order]
    tp = np.cumsum(y)
    fp = np.cumsum(1 - y)
    last = np.flatnonzero(np.r_[s[1:] != s[:-1], True])  # final index of each tie block
    return [(float(s[i]), tp[i] / (tp[i] + fp[i]), tp[i] / n_pos) for i in last]


def auprc(pairs: Iterable[tuple[float, int]]) -> float | None:
    """Step-wise area under the precision-recall curve (average precision)."""
    curve = pr_curve(pairs)
    if not curve:
        return None
    area = 0.0
    prev_recall = 0.0
    for _, precision, recall in curve:
        area += (recall - prev_recall) * precision
        prev_recall = recall
    return float(area)


def theil_sen(points: Iterable[tuple[float, float]]) -> float | None:
    """Median of all pairwise slopes between points with distinct x."""
    pts = list(points)
    slopes = [
        (yj - yi) / (xj - xi)
        for i, (xi, yi) in enumerate(pts)
        for xj, yj in pts[i + 1:]
        if xj != xi
    ]
    if not slopes:
        return None
    return median(slopes)


def median(values: Sequence[float]) -> float:
    s = sorted(values)
    m = len(s) // 2
    return s[m] if len(s) % 2 else (s[m - 1] + s[m]) / 2


def mean(values: Sequence[float]) -> float | None:
    return math.fsum(values) / len(values) if len(values) else None


def sem(values: Sequence[float]) -> float | None:
    """Standard error of the mean with the n-1 sample standard deviation."""
    n = len(values)
    if n < 2:
        return None
    return float(np.std(np.asarray(values, dtype=float), ddof=1) / math.sqrt(n))


def ci95(values: Sequence[float]) -> tuple[float, float] | None:
    m, e = mean(values), sem(values)
    if m is None or e is None:
        return None
    return m - Z95 * e, m + Z95 * e
