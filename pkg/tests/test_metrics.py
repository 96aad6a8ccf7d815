import numpy as np
import pytest

from blockfit.metrics import (metric_accuracy, metric_auc, metric_f1,
                              metric_mae_mean, metric_mae_median, metric_rmse)

from oracles import auc_pairs_brute


class TestClassification:
    def test_auc_perfect_ranking(self):
        assert metric_auc([0, 1, 0, 1], [0.1, 0.9, 0.2, 0.8]) == 1.0

    def test_auc_fully_tied(self):
        assert metric_auc([0, 1], [0.5, 0.5]) == 0.5

    def test_auc_single_class_errors(self):
        with pytest.raises(ValueError, match="both classes"):
            metric_auc([1, 1], [0.2, 0.3])

    def test_f1_hand_confusion_matrix(self):
        # precision 1, recall 0.5
        assert metric_f1([1, 1, 0, 0], [1, 0, 0, 0]) == pytest.approx(2 / 3)

    def test_f1_zero_when_undefined(self):
        assert metric_f1([1, 1], [0, 0]) == 0.0
        assert metric_f1([0, 0], [0, 0]) == 0.0

    def test_accuracy(self):
        assert metric_accuracy([1, 0, 1, 0], [1, 0, 0, 0]) == 0.75

    def test_auc_matches_pair_counting(self):
        rng = np.random.default_rng(123)
        for _ in range(60):
            n = int(rng.integers(2, 200))
            y = rng.integers(0, 2, n).astype(float)
            if y.min() == y.max():
                y[0] = 1.0 - y[0]
            # coarse scores force plenty of ties
            scores = rng.integers(0, 5, n) / 4.0
            assert metric_auc(y, scores) == pytest.approx(
                auc_pairs_brute(y, scores), abs=1e-12)


class TestRegression:
    def test_exact_predictions(self):
        assert metric_rmse([1, 2], [1, 2]) == 0.0
        assert metric_mae_mean([1, 2], [1, 2]) == 0.0
        assert metric_mae_median([1, 2], [1, 2]) == 0.0

    def test_hand_arithmetic(self):
        y = [0, 0, 0, 0]
        p = [1, 1, 3, 3]
        assert metric_rmse(y, p) == pytest.approx(np.sqrt(5))
        assert metric_mae_mean(y, p) == 2.0
        assert metric_mae_median(y, p) == 2.0

    def test_single_pair(self):
        assert metric_rmse([0], [3]) == 3.0
        assert metric_mae_mean([0], [3]) == 3.0
        assert metric_mae_median([0], [3]) == 3.0

    def test_median_midpoint_rule(self):
        assert metric_mae_median([0, 0, 0, 0], [1, 2, 5, 9]) == 3.5

    def test_length_mismatch_errors(self):
        with pytest.raises(ValueError):
            metric_rmse([1, 2], [1])
        with pytest.raises(ValueError):
            metric_accuracy([], [])
