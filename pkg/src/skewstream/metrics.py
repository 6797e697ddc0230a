"""Confusion-matrix statistics for online two-class evaluation.

Provides cumulative and time-decayed (fading-factor) confusion counts, the
imbalance-aware summary measures computed from them, prequential AUC over a
sliding window of recent scores, and a paired Wilcoxon signed-rank test used
when comparing pipelines across repeated runs.

Degenerate denominators (e.g. recall before any positive example arrived)
yield 0 rather than NaN, so decayed metric curves are well defined from the
first step of a stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter
from scipy.stats import rankdata

from .labels import NEG, POS


@dataclass
class ConfusionCounts:
    """Two-class confusion cells. Real-valued so decayed variants can fade."""

    tp: float = 0.0
    fn: float = 0.0
    fp: float = 0.0
    tn: float = 0.0

    def update(self, truth: int, predicted: int) -> None:
        """Add one unit to the cell selected by (truth, predicted)."""
        if truth == POS:
            if predicted == POS:
                self.tp += 1.0
            elif predicted == NEG:
                self.fn += 1.0
            else:
                raise ValueError(f"unknown predicted label {predicted!r}")
        elif truth == NEG:
            if predicted == NEG:
                self.tn += 1.0
            elif predicted == POS:
                self.fp += 1.0
            else:
                raise ValueError(f"unknown predicted label {predicted!r}")
        else:
            raise ValueError(f"unknown truth label {truth!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.tp, self.fn, self.fp, self.tn)


@dataclass
class DecayedConfusion:
    """Confusion counts with a fading factor.

    Each update multiplies all four cells by ``eta`` and then adds one unit to
    the matching cell, so old evidence decays geometrically and the derived
    metrics track the current concept.
    """

    eta: float = 0.995
    counts: ConfusionCounts = field(default_factory=ConfusionCounts)

    def __post_init__(self) -> None:
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")

    def update(self, truth: int, predicted: int) -> None:
        c = self.counts
        c.tp *= self.eta
        c.fn *= self.eta
        c.fp *= self.eta
        c.tn *= self.eta
        c.update(truth, predicted)


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0.0 else 0.0


def recall(c: ConfusionCounts) -> float:
    """TP / (TP + FN); 0 when no positives were seen."""
    return _ratio(c.tp, c.tp + c.fn)


def precision(c: ConfusionCounts) -> float:
    """TP / (TP + FP); 0 when nothing was predicted positive."""
    return _ratio(c.tp, c.tp + c.fp)


def f_measure(c: ConfusionCounts, beta: float = 1.0) -> float:
    """Weighted harmonic combination of recall and precision."""
    if beta <= 0.0:
        raise ValueError(f"beta must be > 0, got {beta}")
    r = recall(c)
    p = precision(c)
    return _ratio((1.0 + beta * beta) * r * p, beta * beta * p + r)


def per_class_recall(c: ConfusionCounts) -> tuple[float, float]:
    """(positive-class recall, negative-class recall)."""
    return _ratio(c.tp, c.tp + c.fn), _ratio(c.tn, c.tn + c.fp)


def g_mean(c: ConfusionCounts) -> float:
    """Geometric mean of the per-class recalls."""
    rp, rn = per_class_recall(c)
    return math.sqrt(rp * rn)


class ScoreWindow:
    """Fixed-capacity FIFO of recent (score, label) pairs."""

    def __init__(self, capacity: int = 500):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = int(capacity)
        self._scores = np.empty(self.capacity, dtype=float)
        self._labels = np.empty(self.capacity, dtype=np.int8)
        self._n = 0
        self._head = 0

    def __len__(self) -> int:
        return self._n

    def push(self, score: float, label: int) -> None:
        i = self._head
        self._scores[i] = score
        self._labels[i] = label
        self._head = (i + 1) % self.capacity
        if self._n < self.capacity:
            self._n += 1

    def clear(self) -> None:
        self._n = 0
        self._head = 0

    def entries(self) -> list[tuple[float, int]]:
        """Contents oldest-first (diagnostic accessor; AUC does not need order)."""
        if self._n < self.capacity:
            idx = range(self._n)
        else:
            idx = [(self._head + j) % self.capacity for j in range(self.capacity)]
        return [(float(self._scores[i]), int(self._labels[i])) for i in idx]

    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if self._n < self.capacity:
            return self._scores[: self._n], self._labels[: self._n]
        return self._scores, self._labels


def prequential_auc(w: ScoreWindow) -> float:
    """Mann-Whitney statistic over the window.

    Fraction of (positive, negative) pairs whose positive score ranks above
    the negative one, ties counted 0.5. Returns 0.5 while the window lacks one
    of the classes (undefined case).
    """
    scores, labels = w._arrays()
    pos_mask = labels == POS
    n_pos = int(pos_mask.sum())
    n_neg = scores.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        return 0.5
    ranks = rankdata(scores)
    u = float(ranks[pos_mask].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


@dataclass(frozen=True)
class WilcoxonResult:
    significant: bool
    statistic: float
    p_value: float
    n: int


class TooFewPairsError(ValueError):
    """Raised when fewer than 6 nonzero paired differences remain."""


def _exact_signed_rank_cdf(ranks: np.ndarray, w: float) -> float:
    """P(W+ <= w) under the null, conditioned on the observed |d| mid-ranks.

    Enumerates the null distribution of the positive rank sum by dynamic
    programming over sign assignments. Ranks are doubled so mid-ranks become
    integers; subset counts fit exactly in float64 for n <= 25 (< 2^53).
    """
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1)
    counts[0] = 1.0
    for r in doubled:
        counts[r:] += counts[: total + 1 - r]
    cutoff = int(math.floor(2.0 * w + 1e-9))
    return float(counts[: cutoff + 1].sum()) / float(counts.sum())


def wilcoxon_signed_rank(a, b, alpha: float = 0.05) -> WilcoxonResult:
    """Two-sided paired signed-rank test at significance level ``alpha``.

    Zero differences are dropped and ties get mid-ranks. With no nonzero
    differences the sequences are identical and the result is "not
    significant". Between 1 and 5 nonzero differences the test has no power
    and TooFewPairsError is raised. The null distribution is enumerated
    exactly up to n = 25 and approximated normally above.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("inputs must be 1-d sequences of equal length")
    d = a - b
    d = d[d != 0.0]
    n = d.shape[0]
    if n == 0:
        return WilcoxonResult(significant=False, statistic=0.0, p_value=1.0, n=0)
    if n < 6:
        raise TooFewPairsError(
            f"need >= 6 nonzero paired differences, got {n}"
        )
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)
    if n > 25:
        mu = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0
        # tie correction: subtract sum(t^3 - t)/48 over tied groups
        _, tie_counts = np.unique(np.abs(d), return_counts=True)
        var -= float((tie_counts**3 - tie_counts).sum()) / 48.0
        z = (w - mu) / math.sqrt(var)
        p = 2.0 * 0.5 * math.erfc(-z / math.sqrt(2.0))
    else:
        p = 2.0 * _exact_signed_rank_cdf(ranks, w)
    p = min(1.0, p)
    return WilcoxonResult(significant=p <= alpha, statistic=w, p_value=p, n=n)


def decayed_confusion_series(
    truths: np.ndarray, preds: np.ndarray, eta: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Decayed (tp, fn, fp, tn) trajectories over a whole prediction record.

    Vectorized equivalent of stepping a DecayedConfusion through the record;
    used when recomputing reporting metrics after a run.
    """
    truths = np.asarray(truths)
    preds = np.asarray(preds)
    cells = (
        (truths == POS) & (preds == POS),
        (truths == POS) & (preds == NEG),
        (truths == NEG) & (preds == POS),
        (truths == NEG) & (preds == NEG),
    )
    out = []
    for ind in cells:
        out.append(lfilter([1.0], [1.0, -eta], ind.astype(float)))
    tp, fn, fp, tn = out
    return tp, fn, fp, tn


def decayed_recall_gmean_series(
    truths: np.ndarray, preds: np.ndarray, eta: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-step decayed (recall_pos, recall_neg, g_mean) arrays."""
    tp, fn, fp, tn = decayed_confusion_series(truths, preds, eta)
    with np.errstate(invalid="ignore", divide="ignore"):
        rp = np.where(tp + fn > 0.0, tp / (tp + fn), 0.0)
        rn = np.where(tn + fp > 0.0, tn / (tn + fp), 0.0)
    return rp, rn, np.sqrt(rp * rn)
