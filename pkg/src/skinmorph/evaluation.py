"""Metrics and statistics for comparing mask post-processing methods.

F1 is pixel-pooled: one confusion matrix accumulated over a whole
dataset, not a mean of per-image scores. Video-style datasets pool per
group first and average the per-group F1 unweighted. The signed-rank
test is exact for small samples, enumerated over doubled ranks so tie
handling stays in integer arithmetic.
"""

import math
from dataclasses import dataclass

import numpy as np

from .mask_core import foreground_count, multiply


@dataclass(frozen=True)
class ConfusionCounts:
    """Pixel counts of a binary confusion matrix."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp,
                               self.fn + other.fn, self.tn + other.tn)

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


def confusion(pred, truth):
    """Confusion counts of a predicted mask against ground truth."""
    if pred.width != truth.width or pred.height != truth.height:
        raise ValueError(
            f"dimension mismatch: {pred.width}x{pred.height} vs "
            f"{truth.width}x{truth.height}")
    tp = foreground_count(multiply(pred, truth))
    fp = foreground_count(pred) - tp
    fn = foreground_count(truth) - tp
    tn = pred.width * pred.height - tp - fp - fn
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def f1(counts):
    """F1 from pooled counts; the empty-vs-empty case scores 1.0."""
    denom = 2 * counts.tp + counts.fp + counts.fn
    if denom == 0:
        return 1.0
    return 2 * counts.tp / denom


def dataset_f1(pairs, groups=None):
    """Pooled F1 over (prediction, truth) pairs.

    Without ``groups`` all pixels pool into one confusion matrix. With
    ``groups`` (one key per pair) pixels pool within each group and the
    per-group F1 scores average unweighted, which stops a long video
    from drowning out short ones.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("no prediction/truth pairs")
    if groups is None:
        total = ConfusionCounts()
        for pred, truth in pairs:
            total = total + confusion(pred, truth)
        return f1(total)
    groups = list(groups)
    if len(groups) != len(pairs):
        raise ValueError(
            f"got {len(pairs)} pairs but {len(groups)} group keys")
    pooled = {}
    order = []
    for key, (pred, truth) in zip(groups, pairs):
        if key not in pooled:
            pooled[key] = ConfusionCounts()
            order.append(key)
        pooled[key] = pooled[key] + confusion(pred, truth)
    return sum(f1(pooled[key]) for key in order) / len(order)


def average_precision(scores, positive):
    """Average precision on a 0..100 scale.

    Tied scores form one block: precision and recall move to the block
    boundary in a single step, so the result does not depend on the
    order ties arrive in.
    """
    scores = np.asarray(scores, dtype=float)
    positive = np.asarray(positive, dtype=bool)
    if scores.ndim != 1 or scores.shape != positive.shape:
        raise ValueError("scores and labels must be matching 1-D sequences")
    if scores.size == 0:
        raise ValueError("no examples")
    npos = int(positive.sum())
    if npos == 0:
        raise ValueError("no positive examples")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    p = positive[order]
    block_end = np.flatnonzero(np.diff(s) != 0)
    block_end = np.concatenate([block_end, [s.size - 1]])
    tp = np.cumsum(p)[block_end]
    seen = block_end + 1
    recall = tp / npos
    precision = tp / seen
    prev = np.concatenate([[0.0], recall[:-1]])
    return float(np.sum((recall - prev) * precision)) * 100.0


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float
    p_value: float
    n: int


def wilcoxon_signed_rank(x, y, exact_limit=20):
    """Two-sided paired signed-rank test of ``x`` against ``y``.

    Zero differences drop out; tied magnitudes share averaged ranks.
    Up to ``exact_limit`` nonzero pairs the p-value enumerates all sign
    assignments exactly (over doubled ranks, so it is pure integer
    counting); larger samples use the normal approximation with tie
    correction. All differences zero degenerates to p = 1.0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError("x and y must be matching 1-D sequences")
    if x.size == 0:
        raise ValueError("no pairs")
    d = x - y
    d = d[d != 0]
    n = d.size
    if n == 0:
        return WilcoxonResult(statistic=0.0, p_value=1.0, n=0)
    ranks = _average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    if n <= exact_limit:
        p = _exact_two_sided(ranks, w_plus)
    else:
        p = _normal_two_sided(ranks, w_plus, n)
    return WilcoxonResult(statistic=w_plus, p_value=p, n=n)


def _average_ranks(values):
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=float)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j + 2) / 2
        i = j + 1
    return ranks


def _exact_two_sided(ranks, w_plus):
    # doubled ranks are integers even when ties average to .5
    r2 = np.rint(2 * ranks).astype(np.int64)
    total = int(r2.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in r2:
        nxt = counts.copy()
        nxt[r:] += counts[:total + 1 - r]
        counts = nxt
    mu2 = total / 2
    obs = abs(2 * w_plus - mu2)
    dist = np.abs(np.arange(total + 1) - mu2)
    tail = int(counts[dist >= obs - 1e-9].sum())
    return tail / float(2 ** len(ranks))


def _normal_two_sided(ranks, w_plus, n):
    mu = n * (n + 1) / 4
    var = n * (n + 1) * (2 * n + 1) / 24
    _, tie_counts = np.unique(ranks, return_counts=True)
    var -= float(((tie_counts ** 3 - tie_counts) / 48).sum())
    if var <= 0:
        return 1.0
    z = (w_plus - mu) / math.sqrt(var)
    return math.erfc(abs(z) / math.sqrt(2))


def global_rank(table):
    """Ranks of methods from a datasets-by-methods score table.

    Within each dataset row the best (largest) value ranks 1, ties
    averaged. Each method's row ranks then average, and those averages
    rank again (smallest average ranks 1). Returns the per-method
    average ranks and their final ranks.
    """
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] < 1:
        raise ValueError("expected a non-empty 2-D score table")
    row_ranks = np.vstack([_average_ranks(-row) for row in table])
    avg = row_ranks.mean(axis=0)
    final = _average_ranks(avg)
    return avg, final
