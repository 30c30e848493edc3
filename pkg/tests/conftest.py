import os

import numpy as np
import pandas as pd
import pytest

from functions.ingest import GENRES
from functions.linkstream import Interval, LinkStream

# (begin, end, user, item)
TOY_LINKS = [(2, 7, "u", "x"), (9, 10, "u", "x"), (1, 2, "u", "y"), (3, 8, "v", "x"), (4, 5, "v", "y")]
TOY_SPAN = Interval(0, 10)

BASE_TIME = 1_100_000_000
DAY = 86400


@pytest.fixture
def toy_stream():
    return LinkStream.from_links(TOY_LINKS, TOY_SPAN)


def write_movielens(directory, n_users=20, n_items=15, n_ratings=1000, n_tags=60, seed=0) -> str:
    """Writes a small MovieLens-format dataset with user and item effects in the ratings."""
    rng = np.random.default_rng(seed)
    os.makedirs(directory, exist_ok=True)
    user_bias = rng.normal(0, 0.7, n_users)
    item_bias = rng.normal(0, 0.7, n_items)
    users = rng.integers(0, n_users, n_ratings)
    items = rng.integers(0, n_items, n_ratings)
    raw = 3.5 + user_bias[users] + item_bias[items] + rng.normal(0, 0.3, n_ratings)
    ratings = np.clip(np.round(raw * 2) / 2, 0.5, 5.0)
    times = BASE_TIME + rng.integers(0, 60 * DAY, n_ratings)
    pd.DataFrame({
        "userId": users + 1,
        "movieId": items + 1,
        "rating": ratings,
        "timestamp": times,
    }).to_csv(os.path.join(directory, "ratings.csv"), index=False, float_format="%.1f")

    titles, genres = [], []
    for i in range(n_items):
        titles.append(f"Movie {i + 1}, The ({1925 + 6 * i})")
        genres.append("|".join(GENRES[j % len(GENRES)] for j in range(i, i + 1 + i % 3)))
    titles[0] = "Untitled"
    genres[1] = "(no genres listed)"
    genres[2] = "Drama|IMAX"
    pd.DataFrame({"movieId": np.arange(1, n_items + 1), "title": titles, "genres": genres}).to_csv(
        os.path.join(directory, "movies.csv"), index=False)

    tag_users = rng.integers(0, n_users, n_tags)
    tag_items = rng.integers(0, n_items, n_tags)
    pd.DataFrame({
        "userId": tag_users + 1,
        "movieId": tag_items + 1,
        "tag": [f"tag {k}" for k in range(n_tags)],
        "timestamp": BASE_TIME + rng.integers(0, 60 * DAY, n_tags),
    }).to_csv(os.path.join(directory, "tags.csv"), index=False)
    return str(directory)


@pytest.fixture
def movielens_dir(tmp_path):
    return write_movielens(tmp_path / "ml")
