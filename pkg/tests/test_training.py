import numpy as np
import pytest

import train_corpus
from skinmorph.classification import ThresholdParams
from skinmorph.mask_core import BinaryMask
from skinmorph.training import (CorpusEntry, GridSpec, TrainingCorpus,
                                grid_search, leave_one_dataset_out, objective)


def entry(pred, gt, dataset_id=""):
    return CorpusEntry(prediction=BinaryMask.from_array(np.asarray(pred, bool)),
                       ground_truth=BinaryMask.from_array(np.asarray(gt, bool)),
                       dataset_id=dataset_id)


class TestCorpus:
    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            CorpusEntry(prediction=BinaryMask.zeros(4, 4),
                        ground_truth=BinaryMask.zeros(4, 5))

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            TrainingCorpus(entries=())

    def test_dataset_ids_first_appearance_order(self):
        e1 = entry([[1]], [[1]], "b")
        e2 = entry([[1]], [[1]], "a")
        e3 = entry([[1]], [[1]], "b")
        corpus = TrainingCorpus(entries=(e1, e2, e3))
        assert corpus.dataset_ids() == ["b", "a"]

    def test_without_dataset(self):
        corpus = TrainingCorpus(entries=(entry([[1]], [[1]], "a"),
                                         entry([[0]], [[0]], "b")))
        kept = corpus.without_dataset("a")
        assert len(kept) == 1
        assert kept.entries[0].dataset_id == "b"

    def test_without_last_dataset_rejected(self):
        corpus = TrainingCorpus(entries=(entry([[1]], [[1]], "a"),))
        with pytest.raises(ValueError):
            corpus.without_dataset("a")


class TestGridSpec:
    def test_default_axes_nonempty(self):
        grid = GridSpec()
        for name in ("a1", "a2", "b1", "b2", "c1"):
            assert len(getattr(grid, name)) > 0

    def test_points_skip_inverted_thresholds(self):
        grid = GridSpec(a1=(0.1, 0.3), a2=(0.05, 0.2), b1=(4,), b2=(10,),
                        c1=(0.5,))
        points = list(grid.points())
        # (0.1, 0.2) violates a2 < a1 and must not appear
        assert len(points) == 3
        assert all(p.a2 < p.a1 for p in points)

    def test_points_lexicographic(self):
        grid = train_corpus.GRID
        keys = [(p.a1, p.a2, p.b1, p.b2, p.c1) for p in grid.points()]
        assert keys == sorted(keys)
        assert len(keys) == 32

    def test_empty_axis_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            GridSpec(b1=())


class TestObjective:
    def test_perfect_params_score_known(self):
        corpus = train_corpus.make_corpus(dataset_ids=("d1",))
        score = objective(train_corpus.PLANT, corpus, train_corpus.CONFIG)
        assert score == pytest.approx(train_corpus.PLANT_SCORE, abs=1e-12)

    def test_all_empty_truth_warns(self):
        corpus = TrainingCorpus(entries=(entry([[1, 1]], [[0, 0]]),))
        with pytest.warns(UserWarning, match="empty"):
            score = objective(train_corpus.PLANT, corpus)
        assert score == 0.0


class TestGridSearch:
    def test_recovers_planted_params(self):
        corpus = train_corpus.make_corpus(dataset_ids=("d1",))
        params, score = grid_search(train_corpus.GRID, corpus,
                                    train_corpus.CONFIG)
        assert params == train_corpus.PLANT
        assert score == pytest.approx(train_corpus.PLANT_SCORE, abs=1e-12)

    def test_parallel_matches_serial(self):
        corpus = train_corpus.make_corpus(dataset_ids=("d1",))
        serial = grid_search(train_corpus.GRID, corpus, train_corpus.CONFIG)
        parallel = grid_search(train_corpus.GRID, corpus, train_corpus.CONFIG,
                               jobs=2)
        assert parallel == serial

    def test_ties_break_lexicographically(self):
        # a single image no grid point can alter: every point scores
        # the same, so the first point in lexicographic order wins
        pred, gt = train_corpus.image_pairs()[1]
        corpus = TrainingCorpus(entries=(CorpusEntry(pred, gt, "d1"),))
        params, score = grid_search(train_corpus.GRID, corpus,
                                    train_corpus.CONFIG)
        assert score == pytest.approx(1.0)
        assert params == ThresholdParams(0.15, 0.05, 4, 10, 0.3)

    def test_bad_jobs_rejected(self):
        corpus = train_corpus.make_corpus(dataset_ids=("d1",))
        with pytest.raises(ValueError):
            grid_search(train_corpus.GRID, corpus, train_corpus.CONFIG,
                        jobs=0)

    def test_all_points_invalid_rejected(self):
        grid = GridSpec(a1=(0.1,), a2=(0.2,), b1=(4,), b2=(10,), c1=(0.5,))
        corpus = train_corpus.make_corpus(dataset_ids=("d1",))
        with pytest.raises(ValueError, match="valid"):
            grid_search(grid, corpus, train_corpus.CONFIG)


class TestLeaveOneOut:
    def test_each_holdout_recovers_plant(self):
        corpus = train_corpus.make_corpus()
        results = leave_one_dataset_out(train_corpus.GRID, corpus,
                                        train_corpus.CONFIG)
        assert list(results) == ["d1", "d2", "d3"]
        for params, score in results.values():
            assert params == train_corpus.PLANT
            assert score == pytest.approx(train_corpus.PLANT_SCORE, abs=1e-12)

    def test_single_dataset_rejected(self):
        corpus = train_corpus.make_corpus(dataset_ids=("only",))
        with pytest.raises(ValueError, match="2 datasets"):
            leave_one_dataset_out(train_corpus.GRID, corpus,
                                  train_corpus.CONFIG)
