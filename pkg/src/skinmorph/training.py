"""Threshold fitting by exhaustive grid search.

The objective is the corpus-pooled F1 after adaptive post-processing.
Grids stay small enough (tens of thousands of points) that exhaustive
search is cheap, deterministic, and free of local optima, which matters
more here than speed: the fitted thresholds get baked into published
configurations. Ties break toward the lexicographically smallest
parameter tuple so reruns and parallel runs agree bit for bit.
"""

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .classification import ThresholdParams
from .evaluation import ConfusionCounts, confusion, f1
from .mask_core import foreground_count
from .pipelines import DEFAULT_CONFIG, postprocess_adaptive


@dataclass(frozen=True)
class CorpusEntry:
    """One training example: detector mask, truth mask, source dataset."""

    prediction: object
    ground_truth: object
    dataset_id: str = ""

    def __post_init__(self):
        p, g = self.prediction, self.ground_truth
        if p.width != g.width or p.height != g.height:
            raise ValueError(
                f"dimension mismatch in corpus entry: {p.width}x{p.height} "
                f"vs {g.width}x{g.height}")


@dataclass(frozen=True)
class TrainingCorpus:
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ValueError("training corpus is empty")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def dataset_ids(self):
        seen = []
        for e in self.entries:
            if e.dataset_id not in seen:
                seen.append(e.dataset_id)
        return seen

    def without_dataset(self, dataset_id):
        kept = [e for e in self.entries if e.dataset_id != dataset_id]
        if not kept:
            raise ValueError(
                f"removing dataset {dataset_id!r} empties the corpus")
        return TrainingCorpus(entries=tuple(kept))


@dataclass(frozen=True)
class GridSpec:
    """Candidate values per threshold axis.

    The cross product is searched exhaustively, minus points violating
    a2 < a1. Defaults cover the useful range at coarse-but-honest
    steps; a full default sweep is ~41k valid points.
    """

    a1: tuple = tuple(round(0.10 + 0.05 * i, 2) for i in range(9))
    a2: tuple = tuple(round(0.02 + 0.02 * i, 2) for i in range(5))
    b1: tuple = tuple(range(4, 21, 2))
    b2: tuple = tuple(range(20, 61, 4))
    c1: tuple = tuple(round(0.15 + 0.05 * i, 2) for i in range(11))

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2", "c1"):
            vals = tuple(getattr(self, name))
            if not vals:
                raise ValueError(f"grid axis {name} is empty")
            object.__setattr__(self, name, vals)

    def points(self):
        """Valid parameter tuples in lexicographic order."""
        for a1 in self.a1:
            for a2 in self.a2:
                if a2 >= a1:
                    continue
                for b1 in self.b1:
                    for b2 in self.b2:
                        for c1 in self.c1:
                            yield ThresholdParams(a1=a1, a2=a2, b1=b1,
                                                  b2=b2, c1=c1)


def objective(params, corpus, config=DEFAULT_CONFIG):
    """Corpus-pooled F1 after adaptive post-processing with ``params``."""
    if not any(foreground_count(e.ground_truth) for e in corpus):
        warnings.warn("every ground truth in the corpus is empty; "
                      "objective is 0 by definition", stacklevel=2)
        return 0.0
    total = ConfusionCounts()
    for e in corpus:
        out, _ = postprocess_adaptive(e.prediction, params, config)
        total = total + confusion(out, e.ground_truth)
    return f1(total)


def _params_key(params):
    return (params.a1, params.a2, params.b1, params.b2, params.c1)


_WORKER_STATE = {}


def _worker_init(corpus, config):
    _WORKER_STATE["corpus"] = corpus
    _WORKER_STATE["config"] = config


def _worker_best(chunk):
    corpus = _WORKER_STATE["corpus"]
    config = _WORKER_STATE["config"]
    best = None
    for params in chunk:
        key = (-objective(params, corpus, config), _params_key(params))
        if best is None or key < best[0]:
            best = (key, params)
    return best


def grid_search(grid, corpus, config=DEFAULT_CONFIG, jobs=1):
    """Exhaustive search of ``grid`` maximizing the corpus objective.

    Returns (best_params, best_score). With jobs > 1 the grid splits
    across processes; the reduction is order-independent, so the result
    matches a serial run exactly.
    """
    points = list(grid.points())
    if not points:
        raise ValueError("grid contains no valid points (check a2 < a1)")
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1:
        best = None
        for params in points:
            key = (-objective(params, corpus, config), _params_key(params))
            if best is None or key < best[0]:
                best = (key, params)
    else:
        chunks = [points[i::jobs] for i in range(jobs)]
        chunks = [c for c in chunks if c]
        with ProcessPoolExecutor(max_workers=len(chunks),
                                 initializer=_worker_init,
                                 initargs=(corpus, config)) as pool:
            results = list(pool.map(_worker_best, chunks))
        best = min(results, key=lambda item: item[0])
    (neg_score, _), params = best
    return params, -neg_score


def leave_one_dataset_out(grid, corpus, config=DEFAULT_CONFIG, jobs=1):
    """Fit one parameter set per dataset, trained on all the others.

    Returns {dataset_id: (params, score)} in first-appearance order of
    the ids. Needs at least two distinct dataset ids.
    """
    ids = corpus.dataset_ids()
    if len(ids) < 2:
        raise ValueError(
            f"leave-one-dataset-out needs >= 2 datasets, got {len(ids)}")
    out = {}
    for dataset_id in ids:
        held_in = corpus.without_dataset(dataset_id)
        out[dataset_id] = grid_search(grid, held_in, config, jobs=jobs)
    return out
