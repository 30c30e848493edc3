from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from functions.errors import ConfigurationError, DomainError, ValidationError

MIN_RATING, MAX_RATING = 0.5, 5.0
PREDICTION_COLUMNS = ["user", "item", "predicted", "truth"]


@dataclass(frozen=True, eq=False)
class PredictionSet:
    """Predicted and true ratings of observed (user, item) pairs; predictions clamped to the scale."""
    frame: pd.DataFrame

    def __post_init__(self):
        missing = set(PREDICTION_COLUMNS) - set(self.frame.columns)
        if missing:
            raise ValidationError(f"prediction frame lacks columns {sorted(missing)}")
        frame = self.frame[PREDICTION_COLUMNS].reset_index(drop=True)
        frame["predicted"] = frame["predicted"].astype(float).clip(MIN_RATING, MAX_RATING)
        frame["truth"] = frame["truth"].astype(float)
        object.__setattr__(self, "frame", frame)

    @classmethod
    def from_arrays(cls, users, items, predicted, truth) -> "PredictionSet":
        return cls(pd.DataFrame({"user": users, "item": items, "predicted": predicted, "truth": truth}))

    def __len__(self):
        return len(self.frame)

    @property
    def errors(self) -> np.ndarray:
        return self.frame["predicted"].to_numpy() - self.frame["truth"].to_numpy()


Predictions = Union[PredictionSet, pd.DataFrame]


def _as_set(predictions: Predictions) -> PredictionSet:
    return predictions if isinstance(predictions, PredictionSet) else PredictionSet(predictions)


def _nonempty_errors(predictions: Predictions) -> np.ndarray:
    errors = _as_set(predictions).errors
    if errors.size == 0:
        raise DomainError("cannot score an empty prediction set")
    return errors


def mae(predictions: Predictions) -> float:
    return float(np.mean(np.abs(_nonempty_errors(predictions))))


def rmse(predictions: Predictions) -> float:
    return float(np.sqrt(np.mean(_nonempty_errors(predictions) ** 2)))


def _discounted_gain(frame: pd.DataFrame, order_by: List[str], ascending: List[bool], k: int) -> pd.Series:
    ranked = frame.sort_values(["user"] + order_by, ascending=[True] + ascending, kind="mergesort")
    rank = ranked.groupby("user", sort=False).cumcount().to_numpy() + 1
    gain = (np.power(2.0, ranked["truth"].to_numpy()) - 1) / np.log2(1 + rank)
    gain = np.where(rank <= k, gain, 0.0)
    return pd.Series(gain, index=ranked["user"].to_numpy()).groupby(level=0).sum()


def ndcg_at_k(predictions: Predictions, k: int = 10) -> float:
    """
    Mean over users of NDCG@k.

    Each user's test items are ranked by predicted rating, highest first, ties broken by item id;
    relevance is the true rating. Users whose ideal DCG is 0 are skipped.
    """
    if k < 1:
        raise ConfigurationError(f"k must be at least 1, got {k}")
    frame = _as_set(predictions).frame
    dcg = _discounted_gain(frame, ["predicted", "item"], [False, True], k)
    idcg = _discounted_gain(frame, ["truth", "item"], [False, True], k)
    scorable = idcg > 0
    if not scorable.any():
        raise DomainError("no user with a positive ideal DCG to score")
    return float((dcg[scorable] / idcg[scorable]).mean())


def score(predictions: Predictions, k: int = 10) -> Dict[str, float]:
    predictions = _as_set(predictions)
    result = {"mae": mae(predictions), "rmse": rmse(predictions), "ndcg": ndcg_at_k(predictions, k)}
    if result["mae"] > result["rmse"] + 1e-12:
        raise DomainError(f"mae {result['mae']} exceeds rmse {result['rmse']}")
    return result


@dataclass(frozen=True)
class FoldMetrics:
    fold: int
    n_train: int
    n_test: int
    mae: float
    rmse: float
    ndcg: float
    train_mae: float
    train_rmse: float
    train_ndcg: float
    global_mean_rmse: float

    @property
    def beats_global_mean(self) -> bool:
        return self.rmse < self.global_mean_rmse


@dataclass
class MetricsReport:
    k: int = 10
    folds: List[FoldMetrics] = field(default_factory=list)
    options: Optional[Dict] = None

    def _values(self, name: str) -> np.ndarray:
        return np.array([getattr(f, name) for f in self.folds], dtype=float)

    def mean(self, name: str) -> float:
        return float(self._values(name).mean()) if self.folds else float("nan")

    def std(self, name: str) -> float:
        return float(self._values(name).std()) if self.folds else float("nan")

    def aggregate(self) -> Dict[str, Dict[str, float]]:
        names = ["mae", "rmse", "ndcg", "train_mae", "train_rmse", "train_ndcg", "global_mean_rmse"]
        return {name: {"mean": self.mean(name), "std": self.std(name)} for name in names}

    def as_dict(self) -> Dict:
        return {
            "k": self.k,
            "options": self.options or {},
            "folds": [asdict(f) for f in self.folds],
            "aggregate": self.aggregate(),
        }
