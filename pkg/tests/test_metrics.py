import math

import numpy as np
import pandas as pd
import pytest

from functions.errors import ConfigurationError, DomainError, ValidationError
from functions.metrics import FoldMetrics, MetricsReport, PredictionSet, mae, ndcg_at_k, rmse, score


def predictions(predicted, truth, users=None, items=None):
    n = len(predicted)
    users = users if users is not None else [1] * n
    items = items if items is not None else list(range(n))
    return PredictionSet.from_arrays(users, items, predicted, truth)


def test_perfect_predictions():
    p = predictions([3.0, 4.5, 1.0], [3.0, 4.5, 1.0])
    assert mae(p) == 0.0
    assert rmse(p) == 0.0


def test_mae_and_rmse():
    p = predictions([3.0, 4.0], [4.0, 2.0])
    assert mae(p) == 1.5
    assert rmse(p) == pytest.approx(math.sqrt(2.5))


def test_single_pair():
    assert mae(predictions([0.5], [5.0])) == 4.5


def test_constant_error():
    assert rmse(predictions([2.0, 3.0, 4.0], [3.0, 4.0, 5.0])) == 1.0


def test_empty_set_is_a_domain_error():
    with pytest.raises(DomainError):
        mae(predictions([], []))
    with pytest.raises(DomainError):
        rmse(predictions([], []))


def test_predictions_are_clamped():
    p = predictions([7.0, -1.0], [5.0, 0.5])
    assert p.frame["predicted"].tolist() == [5.0, 0.5]
    assert mae(p) == 0.0


def test_prediction_frame_needs_columns():
    with pytest.raises(ValidationError):
        PredictionSet(pd.DataFrame({"user": [1], "predicted": [3.0]}))


def test_ndcg_perfect_ranking():
    p = predictions([5.0, 4.0, 2.0, 1.0], [5.0, 4.0, 2.0, 1.0], users=[1, 1, 2, 2])
    assert ndcg_at_k(p, 10) == 1.0


def test_ndcg_swapped_pair():
    # true ratings by predicted rank are (1, 2); the ideal order is (2, 1)
    p = predictions([5.0, 4.0], [1.0, 2.0])
    dcg = 1 + 3 / math.log2(3)
    idcg = 3 + 1 / math.log2(3)
    assert ndcg_at_k(p, 2) == pytest.approx(dcg / idcg)
    assert ndcg_at_k(p, 2) == pytest.approx(0.7967, abs=1e-4)


def test_ndcg_single_item_user():
    assert ndcg_at_k(predictions([0.5], [4.0]), 10) == 1.0


def test_ndcg_ties_broken_by_item():
    p = predictions([3.0, 3.0], [1.0, 5.0], items=[20, 10])
    assert ndcg_at_k(p, 10) == 1.0


def test_ndcg_errors():
    with pytest.raises(ConfigurationError):
        ndcg_at_k(predictions([3.0], [3.0]), 0)
    with pytest.raises(DomainError):
        ndcg_at_k(predictions([3.0, 2.0], [0.0, 0.0]), 5)


def naive_scores(users, items, predicted, truth, k):
    predicted = [min(max(p, 0.5), 5.0) for p in predicted]
    n = len(truth)
    naive_mae = sum(abs(predicted[j] - truth[j]) for j in range(n)) / n
    naive_rmse = math.sqrt(sum((predicted[j] - truth[j]) ** 2 for j in range(n)) / n)
    values = []
    for user in sorted(set(users)):
        rows = [j for j in range(n) if users[j] == user]
        ranked = sorted(rows, key=lambda j: (-predicted[j], items[j]))
        ideal = sorted(rows, key=lambda j: (-truth[j], items[j]))
        dcg = sum((2 ** truth[j] - 1) / math.log2(1 + r) for r, j in enumerate(ranked[:k], start=1))
        idcg = sum((2 ** truth[j] - 1) / math.log2(1 + r) for r, j in enumerate(ideal[:k], start=1))
        if idcg > 0:
            values.append(dcg / idcg)
    return naive_mae, naive_rmse, sum(values) / len(values)


def test_metrics_match_direct_formulas():
    rng = np.random.default_rng(12)
    scale = np.arange(1, 11) / 2
    for _ in range(1000):
        n = int(rng.integers(1, 21))
        users = rng.integers(0, 4, n).tolist()
        items = rng.permutation(50)[:n].tolist()
        predicted = rng.uniform(0, 5.5, n).tolist()
        truth = rng.choice(scale, n).tolist()
        k = int(rng.integers(1, 6))
        p = PredictionSet.from_arrays(users, items, predicted, truth)
        expected = naive_scores(users, items, predicted, truth, k)
        result = score(p, k)
        assert result["mae"] == pytest.approx(expected[0], abs=1e-9)
        assert result["rmse"] == pytest.approx(expected[1], abs=1e-9)
        assert result["ndcg"] == pytest.approx(expected[2], abs=1e-9)
        assert result["mae"] <= result["rmse"] + 1e-12
        assert 0.0 <= result["ndcg"] <= 1.0 + 1e-12


def fold(fold_id, rmse_value):
    return FoldMetrics(fold_id, 80, 20, 0.5, rmse_value, 0.9, 0.4, 0.6, 0.95, 1.0)


def test_report_aggregates():
    report = MetricsReport(10, [fold(0, 0.8), fold(1, 1.2)])
    assert report.mean("rmse") == pytest.approx(1.0)
    assert report.std("rmse") == pytest.approx(0.2)
    data = report.as_dict()
    assert len(data["folds"]) == 2
    assert data["aggregate"]["ndcg"] == {"mean": 0.9, "std": 0.0}


def test_fold_against_global_mean():
    assert fold(0, 0.8).beats_global_mean
    assert not fold(0, 1.2).beats_global_mean
