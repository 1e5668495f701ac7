import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stylesearch.errors import ContractError
from stylesearch.evaluation import (
    accuracy,
    confusion,
    evaluation_report,
    format_matrix_grid,
    normalize_rows,
    pr_curve,
)


class TestConfusion:
    def test_perfect_prediction_is_diagonal(self):
        cm = confusion([0, 1, 2], [0, 1, 2], 3)
        np.testing.assert_array_equal(cm.counts, np.eye(3, dtype=np.int64))

    def test_all_misclassified(self):
        cm = confusion([0, 0], [1, 1], 2)
        expected = np.array([[0, 2], [0, 0]])
        np.testing.assert_array_equal(cm.counts, expected)

    def test_out_of_range_rejected(self):
        with pytest.raises(ContractError):
            confusion([0, 3], [0, 0], 3)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ContractError):
            confusion([0, 1], [0], 2)

    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=200))
    @settings(max_examples=50, deadline=None)
    def test_trace_over_total_equals_accuracy(self, pairs):
        truth = [t for t, _ in pairs]
        predicted = [p for _, p in pairs]
        cm = confusion(truth, predicted, 5)
        assert cm.accuracy() == pytest.approx(accuracy(truth, predicted))
        assert cm.total == len(pairs)


class TestNormalizeRows:
    def test_identity_counts(self):
        np.testing.assert_array_equal(normalize_rows(np.eye(3)), np.eye(3))

    def test_even_row(self):
        np.testing.assert_allclose(normalize_rows([[2, 2]]), [[0.5, 0.5]])

    def test_empty_row_stays_zero(self):
        out = normalize_rows([[0, 0], [1, 3]])
        np.testing.assert_allclose(out[0], [0, 0])
        np.testing.assert_allclose(out[1], [0.25, 0.75])

    @given(st.lists(st.lists(st.integers(0, 50), min_size=3, max_size=3), min_size=1, max_size=8))
    @settings(max_examples=50, deadline=None)
    def test_rows_sum_to_one_and_idempotent(self, rows):
        out = normalize_rows(rows)
        for raw, normed in zip(rows, out):
            if sum(raw):
                assert abs(normed.sum() - 1.0) < 1e-9
        np.testing.assert_allclose(normalize_rows(out), out, atol=1e-9)


class TestAccuracy:
    def test_identical(self):
        assert accuracy([1, 2, 3], [1, 2, 3]) == 1.0

    def test_fully_mismatched(self):
        assert accuracy([0, 0], [1, 1]) == 0.0

    def test_three_of_four(self):
        assert accuracy([0, 1, 1, 0], [0, 1, 0, 0]) == 0.75

    def test_empty_rejected(self):
        with pytest.raises(ContractError):
            accuracy([], [])


class TestPRCurve:
    def test_perfect_ranking(self):
        assert pr_curve([0.9, 0.1], [1, 0]).average_precision == pytest.approx(1.0)

    def test_reversed_two_sample(self):
        assert pr_curve([0.1, 0.9], [1, 0]).average_precision == pytest.approx(0.5)

    def test_recalls_non_decreasing(self):
        rng = np.random.default_rng(0)
        truth = rng.integers(0, 2, 50)
        truth[0] = 1
        curve = pr_curve(rng.random(50), truth)
        assert np.all(np.diff(curve.recalls) >= 0)

    def test_no_positives_rejected(self):
        with pytest.raises(ContractError):
            pr_curve([0.5, 0.2], [0, 0])

    def test_confusion_recall_matches_curve_end(self):
        # at the loosest threshold every sample is predicted positive, so
        # recall is 1 by definition; the curve must end there
        curve = pr_curve([0.3, 0.8, 0.5, 0.1], [1, 0, 1, 0])
        assert curve.recalls[-1] == pytest.approx(1.0)

    # scores quantized to 1e-6 so the affine/exp transforms below stay
    # strictly monotone in float arithmetic
    @given(st.lists(st.tuples(st.integers(0, 10 ** 6).map(lambda v: v / 10 ** 6),
                              st.integers(0, 1)), min_size=2, max_size=80))
    @settings(max_examples=60, deadline=None)
    def test_ap_bounds_and_monotone_invariance(self, pairs):
        scores = np.array([s for s, _ in pairs])
        truth = np.array([t for _, t in pairs])
        if truth.sum() == 0:
            truth[0] = 1
        curve = pr_curve(scores, truth)
        assert 0.0 <= curve.average_precision <= 1.0 + 1e-12
        transformed = pr_curve(3.0 * scores + 1.0, truth)  # strictly monotone transform
        assert transformed.average_precision == pytest.approx(curve.average_precision)
        exp_transformed = pr_curve(np.exp(scores), truth)
        assert exp_transformed.average_precision == pytest.approx(curve.average_precision)


class TestReport:
    def test_report_fields(self):
        truth = [0, 1, 1, 0]
        predicted = [0, 1, 0, 0]
        scores = np.array([[0.9, 0.1], [0.2, 0.8], [0.6, 0.4], [0.7, 0.3]])
        report = evaluation_report(truth, predicted, ["a", "b"], scores)
        assert report["accuracy"] == 0.75
        assert report["classes"] == ["a", "b"]
        assert len(report["confusion_normalized"]) == 2
        assert set(report["average_precision"]) == {"a", "b"}

    def test_grid_is_aligned(self):
        grid = format_matrix_grid([[1.0, 0.0], [0.25, 0.75]], ["shoes", "bags"])
        lines = grid.splitlines()
        assert len(lines) == 3
        assert len(set(len(l) for l in lines)) == 1
        assert "0.75" in lines[2]
