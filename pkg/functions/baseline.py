import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from functions.errors import ConfigurationError, DomainError
from functions.metrics import MAX_RATING, MIN_RATING

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BiasModel:
    """rating ~ global mean + user offset + item offset; unseen entities have offset 0."""
    global_mean: float
    user_offsets: pd.Series
    item_offsets: pd.Series
    regularization: float

    def predict(self, user, item) -> float:
        value = self.global_mean + self.user_offsets.get(user, 0.0) + self.item_offsets.get(item, 0.0)
        return float(np.clip(value, MIN_RATING, MAX_RATING))

    def predict_frame(self, frame: pd.DataFrame) -> np.ndarray:
        user = frame["user"].map(self.user_offsets).fillna(0.0).to_numpy()
        item = frame["item"].map(self.item_offsets).fillna(0.0).to_numpy()
        return np.clip(self.global_mean + user + item, MIN_RATING, MAX_RATING)


def _damped_means(residual: pd.Series, keys: pd.Series, regularization: float) -> pd.Series:
    grouped = residual.groupby(keys.to_numpy())
    return grouped.sum() / (grouped.size() + regularization)


def fit_baseline(train: pd.DataFrame, regularization: float = 10.0, epochs: int = 10) -> BiasModel:
    """
    Fits the bias model by alternating regularised least squares.

    Args:
        train: frame with user, item and rating columns
        regularization: damping added to every entity's rating count
        epochs: number of (item, user) update rounds

    Returns:
        BiasModel
    """
    if train.empty:
        raise DomainError("cannot fit the baseline on zero ratings")
    if regularization < 0 or epochs < 1:
        raise ConfigurationError(f"bad baseline settings: regularization={regularization}, epochs={epochs}")
    ratings = train["rating"].astype(float).reset_index(drop=True)
    users = train["user"].reset_index(drop=True)
    items = train["item"].reset_index(drop=True)
    mean = float(ratings.mean())
    user_offsets = pd.Series(0.0, index=pd.unique(users))
    for _ in range(epochs):
        item_offsets = _damped_means(ratings - mean - users.map(user_offsets), items, regularization)
        user_offsets = _damped_means(ratings - mean - items.map(item_offsets), users, regularization)
    LOGGER.info(f"baseline: mean {mean:.4f}, {len(user_offsets)} user and {len(item_offsets)} item offsets "
                f"(lambda={regularization}, {epochs} epochs)")
    return BiasModel(mean, user_offsets, item_offsets, regularization)


def predict_baseline(model: BiasModel, user, item) -> float:
    return model.predict(user, item)


def global_mean_predictions(train: pd.DataFrame, test: pd.DataFrame) -> np.ndarray:
    mean = float(train["rating"].mean())
    return np.full(len(test), np.clip(mean, MIN_RATING, MAX_RATING))
