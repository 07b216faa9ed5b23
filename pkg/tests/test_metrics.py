import numpy as np
import pytest
from helpers import auc_pr_thresholds, auc_roc_pairs, roc_trapezoid
from hypothesis import given, settings
from hypothesis import strategies as st

from adforge.errors import MetricError
from adforge.metrics import (
    PerformanceMatrix,
    auc_pr,
    auc_roc,
    inverse_rank_metric,
    rank_normalize,
)


def test_auc_roc_example():
    assert auc_roc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75, abs=1e-12)


def test_auc_roc_perfect_and_ties():
    assert auc_roc([1, 2, 3, 4], [0, 0, 1, 1]) == 1.0
    assert auc_roc([1.0, 1.0, 1.0, 1.0], [0, 0, 1, 1]) == 0.5


def test_auc_roc_single_class_raises():
    with pytest.raises(MetricError):
        auc_roc([0.1, 0.2], [1, 1])


def test_auc_pr_examples():
    assert auc_pr([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0]) == pytest.approx(1.0, abs=1e-12)
    assert auc_pr([0.9, 0.1], [0, 1]) == pytest.approx(0.5, abs=1e-12)


def test_auc_pr_random_scores_approach_anomaly_ratio():
    rng = np.random.default_rng(0)
    ratio = 0.2
    vals = []
    for _ in range(300):
        labels = (rng.random(200) < ratio).astype(int)
        if labels.sum() in (0, len(labels)):
            continue
        vals.append(auc_pr(rng.random(200), labels))
    assert abs(np.mean(vals) - ratio) < 0.1 * ratio + 0.02


def test_metrics_match_bruteforce_oracles():
    rng = np.random.default_rng(123)
    for _ in range(300):
        n = int(rng.integers(4, 50))
        labels = rng.integers(0, 2, size=n)
        if labels.sum() in (0, n):
            continue
        scores = np.round(rng.normal(size=n), 2)  # rounding forces ties
        assert auc_roc(scores, labels) == pytest.approx(auc_roc_pairs(scores, labels), abs=1e-12)
        assert auc_pr(scores, labels) == pytest.approx(auc_pr_thresholds(scores, labels), abs=1e-12)


def test_auc_roc_equals_trapezoidal_roc():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(4, 40))
        labels = rng.integers(0, 2, size=n)
        if labels.sum() in (0, n):
            continue
        scores = np.round(rng.normal(size=n), 1)
        assert auc_roc(scores, labels) == pytest.approx(roc_trapezoid(scores, labels), abs=1e-12)


@given(
    st.lists(st.integers(-10**6, 10**6), min_size=2, max_size=30),
    st.sampled_from([0.5, 2.0, 8.0]),
    st.sampled_from([-3.5, 0.0, 10.25]),
)
@settings(max_examples=100, deadline=None)
def test_auc_roc_monotone_transform_invariance(raw, scale, shift):
    labels = np.zeros(len(raw), dtype=int)
    labels[: len(raw) // 2] = 1
    if labels.sum() in (0, len(labels)):
        return
    # lattice scores and power-of-two scales keep the transform exact in floats
    scores = np.asarray(raw, dtype=np.float64) / 16.0
    transformed = scale * scores + shift  # strictly increasing
    assert auc_roc(scores, labels) == pytest.approx(auc_roc(transformed, labels), abs=1e-12)


def test_rank_normalize_examples():
    assert np.allclose(rank_normalize([0.9, 0.7, 0.8]), [1 / 3, 1.0, 2 / 3])
    assert np.allclose(rank_normalize([0.5, 0.5]), [0.75, 0.75])
    out = rank_normalize([0.9, 0.0], failure_mask=[False, True])
    assert np.allclose(out, [0.5, 1.0])


def test_rank_normalize_permutation_contract():
    rng = np.random.default_rng(2)
    for _ in range(100):
        m = int(rng.integers(2, 30))
        raw = rng.normal(size=m)
        ranks = rank_normalize(raw)
        assert np.allclose(np.sort(ranks), np.arange(1, m + 1) / m)
        assert np.argmin(ranks) == np.argmax(raw)
        # strictly monotone transform leaves ranks unchanged
        assert np.allclose(ranks, rank_normalize(np.exp(2.0 * raw)))


def test_inverse_rank_examples():
    assert np.allclose(inverse_rank_metric([0.9, 0.7, 0.8]), [2 / 3, 0.0, 1 / 3])
    assert np.allclose(inverse_rank_metric([1.0, 1.0]), [0.25, 0.25])
    raw = np.array([0.2, 0.9, 0.5])
    assert np.argmax(inverse_rank_metric(raw)) == np.argmax(raw)


def test_performance_matrix_p_rank_and_failures():
    pm = PerformanceMatrix(
        ["a", "b"],
        np.array([[0.9, 0.7, 0.8], [0.5, 0.6, 0.4]]),
        np.array([[False, False, True], [False, False, False]]),
    )
    pr = pm.p_rank()
    assert np.allclose(pr[0], [1 / 3, 2 / 3, 1.0])
    assert np.allclose(pr[1], [2 / 3, 1 / 3, 1.0])
    assert pm.row("b") == 1
