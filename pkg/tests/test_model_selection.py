"""Search-space sampling, AUC scoring, cross-validated random search.

The AUC oracle counts concordant and tied pairs one by one; midrank
sums are exact half-integers in float64, so agreement is asserted with
== rather than a tolerance.
"""

import math

import numpy as np
import pytest

from overlaptree import (
    SearchSpace,
    auc,
    random_search,
    sample_hyperparameters,
    synth_null_overlap,
    synth_rotated_square,
)
from overlaptree.errors import InvalidParameters, UndefinedAUC
from tests.conftest import make_dataset


def oracle_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


class TestAuc:
    def test_known_value(self):
        got = auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1])
        assert got == 0.75

    def test_all_tied_scores_are_coin_flip(self):
        assert auc([0.5] * 6, [0, 1, 0, 1, 0, 1]) == 0.5

    def test_perfect_separation(self):
        assert auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
        assert auc([0.8, 0.9, 0.1, 0.2], [0, 0, 1, 1]) == 0.0

    def test_single_class_rejected(self):
        with pytest.raises(UndefinedAUC):
            auc([0.1, 0.2], [1, 1])

    def test_matches_pair_counting_exactly(self):
        gen = np.random.default_rng(23)
        for _ in range(300):
            n = int(gen.integers(2, 50))
            scores = gen.integers(0, 6, size=n) / 5.0
            labels = gen.integers(0, 2, size=n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            assert auc(scores, labels) == oracle_auc(scores, labels)

    def test_monotone_transformation_invariance(self):
        gen = np.random.default_rng(29)
        scores = gen.standard_normal(40)
        labels = gen.integers(0, 2, size=40)
        labels[0], labels[1] = 0, 1
        assert auc(np.exp(scores), labels) == auc(scores, labels)

    def test_label_complement_identity(self):
        gen = np.random.default_rng(31)
        scores = gen.integers(0, 4, size=30) / 3.0
        labels = gen.integers(0, 2, size=30)
        labels[0], labels[1] = 0, 1
        assert auc(scores, labels) + auc(scores, 1 - labels) == 1.0


class TestSearchSpace:
    def test_defaults_sample_within_declared_ranges(self):
        space = SearchSpace()
        gen = np.random.default_rng(37)
        for _ in range(200):
            hp = sample_hyperparameters(space, 400, gen)
            assert hp.criterion in space.criteria
            assert hp.max_depth in space.max_depth_choices
            lo, hi = space.min_leaf_fraction
            assert hp.min_samples_leaf >= max(1, math.ceil(lo * 400))
            assert hp.min_samples_leaf <= max(1, math.ceil(hi * 400))
            assert hp.min_samples_split == 2 * hp.min_samples_leaf
            lo, hi = space.min_impurity_decrease
            assert lo <= hp.min_impurity_decrease <= hi
            assert hp.max_features == space.max_features

    def test_singleton_space_is_deterministic(self):
        space = SearchSpace(
            max_depth_choices=(4,),
            min_leaf_fraction=(0.02, 0.02),
            min_impurity_decrease=(1e-3, 1e-3),
            criteria=("gini",),
        )
        hp = sample_hyperparameters(space, 100, np.random.default_rng(0))
        assert hp.criterion == "gini"
        assert hp.max_depth == 4
        assert hp.min_samples_leaf == 2
        assert hp.min_samples_split == 4
        assert hp.min_impurity_decrease == pytest.approx(1e-3)

    def test_same_generator_state_same_draw(self):
        space = SearchSpace()
        a = sample_hyperparameters(space, 256, np.random.default_rng(12))
        b = sample_hyperparameters(space, 256, np.random.default_rng(12))
        assert a == b

    def test_leaf_floor_is_at_least_one(self):
        space = SearchSpace(min_leaf_fraction=(0.001, 0.001))
        hp = sample_hyperparameters(space, 10, np.random.default_rng(0))
        assert hp.min_samples_leaf == 1

    def test_invalid_spaces_rejected(self):
        with pytest.raises(InvalidParameters):
            SearchSpace(criteria=())
        with pytest.raises(InvalidParameters):
            SearchSpace(min_leaf_fraction=(0.2, 0.1))
        with pytest.raises(InvalidParameters):
            SearchSpace(min_impurity_decrease=(0.0, 0.1))


class TestRandomSearch:
    def test_full_determinism(self):
        ds = synth_rotated_square(300, 3)
        a = random_search(ds, SearchSpace(), n_trials=6, k_folds=3, seed=11)
        b = random_search(ds, SearchSpace(), n_trials=6, k_folds=3, seed=11)
        assert a.best == b.best
        assert a.cv_auc == b.cv_auc
        assert a.trials == b.trials

    def test_threads_do_not_change_the_result(self):
        ds = synth_rotated_square(300, 3)
        a = random_search(ds, SearchSpace(), n_trials=8, k_folds=3, seed=5)
        b = random_search(
            ds, SearchSpace(), n_trials=8, k_folds=3, seed=5, threads=4
        )
        assert a == b

    def test_best_is_first_argmax_of_trial_means(self):
        ds = synth_rotated_square(300, 7)
        result = random_search(ds, SearchSpace(), n_trials=10, k_folds=3, seed=2)
        means = [tr.mean_auc for tr in result.trials]
        top = max(means)
        first = next(i for i, m in enumerate(means) if m == top)
        assert result.best == result.trials[first].hyperparameters
        assert result.cv_auc == top

    def test_trial_log_is_complete_and_indexed(self):
        ds = synth_null_overlap(200, 3, 1)
        result = random_search(ds, SearchSpace(), n_trials=7, k_folds=4, seed=9)
        assert [tr.index for tr in result.trials] == list(range(7))
        for tr in result.trials:
            assert len(tr.fold_aucs) == 4

    def test_fold_discipline(self):
        ds = synth_rotated_square(240, 5)
        seen = []

        def observer(trial, fold, train_idx, val_idx):
            seen.append((trial, fold, train_idx.copy(), val_idx.copy()))

        random_search(
            ds, SearchSpace(), n_trials=2, k_folds=3, seed=4, observer=observer
        )
        assert len(seen) == 6
        for _, _, train_idx, val_idx in seen:
            assert np.intersect1d(train_idx, val_idx).size == 0
            union = np.union1d(train_idx, val_idx)
            assert union.size == 240
        # validation folds partition the dataset within one trial
        first = [v for tr, _, _, v in seen if tr == 0]
        assert sorted(np.concatenate(first).tolist()) == list(range(240))

    def test_undefined_folds_are_skipped_not_fatal(self):
        # three group-0 samples spread over five folds leave two
        # validation folds single-class; those score None, the rest count
        gen = np.random.default_rng(41)
        X = gen.standard_normal((30, 2))
        t = np.ones(30, dtype=np.int8)
        t[:3] = 0
        ds = make_dataset(X, t)
        result = random_search(ds, SearchSpace(), n_trials=3, k_folds=5, seed=6)
        for tr in result.trials:
            assert any(a is None for a in tr.fold_aucs)
            kept = [a for a in tr.fold_aucs if a is not None]
            assert kept
            assert tr.mean_auc == pytest.approx(
                sum(kept) / len(kept), abs=1e-15
            )

    def test_all_folds_skipped_scores_half(self):
        # with k=2 the lone group-0 sample poisons both folds: its own
        # fold has single-class training data, the other single-class
        # validation labels
        gen = np.random.default_rng(43)
        X = gen.standard_normal((20, 2))
        t = np.ones(20, dtype=np.int8)
        t[0] = 0
        ds = make_dataset(X, t)
        result = random_search(ds, SearchSpace(), n_trials=2, k_folds=2, seed=3)
        for tr in result.trials:
            assert tr.fold_aucs == (None, None)
            assert tr.mean_auc == 0.5

    def test_separable_data_scores_high(self):
        ds = synth_rotated_square(600, 1)
        result = random_search(ds, SearchSpace(), n_trials=10, k_folds=5, seed=1)
        assert result.cv_auc >= 0.55
