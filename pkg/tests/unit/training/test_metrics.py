"""Tests for F1 scores and trimmed statistics."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hetgt.core.errors import ContractError
from hetgt.training.metrics import f1_scores, trimmed_stats


class TestF1Scores:
    def test_perfect_predictions(self):
        assert f1_scores(np.array([0, 1, 2]), np.array([0, 1, 2]), 3) == (1.0, 1.0)

    def test_hand_computed(self):
        true = np.array([0, 0, 1, 1])
        pred = np.array([0, 1, 1, 1])
        macro, micro = f1_scores(pred, true, 2)
        # class 0: p=1, r=1/2 -> 2/3; class 1: p=2/3, r=1 -> 4/5
        assert macro == pytest.approx((2 / 3 + 4 / 5) / 2)
        assert micro == pytest.approx(0.75)

    def test_absent_class_is_skipped(self):
        macro, _ = f1_scores(np.array([0, 1]), np.array([0, 1]), 5)
        assert macro == 1.0

    def test_empty(self):
        assert f1_scores(np.array([], dtype=int), np.array([], dtype=int)) == (0.0, 0.0)

    def test_label_out_of_range(self):
        with pytest.raises(ContractError):
            f1_scores(np.array([0, 3]), np.array([0, 1]), 2)

    def test_length_mismatch(self):
        with pytest.raises(ContractError):
            f1_scores(np.array([0]), np.array([0, 1]))


class TestTrimmedStats:
    def test_thirty_values_keep_twenty_four(self):
        rng = np.random.default_rng(0)
        values = rng.normal(size=30)
        mean, std, kept = trimmed_stats(values, 0.1)
        oracle = np.sort(values)[3:27]
        assert kept == 24
        assert mean == pytest.approx(oracle.mean())
        assert std == pytest.approx(oracle.std(ddof=1))

    def test_five_values_trim_nothing(self):
        mean, _, kept = trimmed_stats([1.0, 2.0, 3.0, 4.0, 100.0], 0.1)
        assert kept == 5
        assert mean == pytest.approx(22.0)

    def test_identical_values_have_zero_std(self):
        assert trimmed_stats([0.5] * 10, 0.1) == (0.5, 0.0, 8)

    def test_single_value(self):
        assert trimmed_stats([0.7], 0.0) == (0.7, 0.0, 1)

    @pytest.mark.parametrize("fraction", [-0.1, 0.5])
    def test_fraction_range(self, fraction):
        with pytest.raises(ContractError):
            trimmed_stats([1.0, 2.0], fraction)

    def test_empty(self):
        with pytest.raises(ContractError):
            trimmed_stats([], 0.1)

    def test_trim_count_is_floored(self):
        _, _, kept = trimmed_stats(list(range(19)), 0.1)
        assert kept == 19 - 2 * math.floor(1.9)
