import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from functions.errors import ValidationError
from functions.ingest import GENRES, MovieRecord
from functions.linkstream import Side

LOGGER = logging.getLogger(__name__)

FIRST_DECADE, DECADES = 1880, 14
STAT_NAMES = ("rmean", "rmedian", "rstd", "rmin", "rmax", "rcount")

GENRE_COLUMNS = [f"genre_{label}" for label in GENRES] + ["genre_none"]
DECADE_COLUMNS = [f"decade_{FIRST_DECADE + 10 * b}" for b in range(DECADES)]


def stat_columns(prefix: str) -> List[str]:
    return [f"{prefix}_{name}" for name in STAT_NAMES]


def content_columns(strict_39: bool = False) -> List[str]:
    """Content block column names: 19 genre + 14 decade + movie stats (+ user stats)."""
    columns = GENRE_COLUMNS + DECADE_COLUMNS + stat_columns("movie")
    if not strict_39:
        columns += stat_columns("user")
    return columns


@dataclass(frozen=True)
class EntityRatingStats:
    mean: float
    median: float
    std_dev: float
    min: float
    max: float
    count_normalized: float

    def as_tuple(self):
        return (self.mean, self.median, self.std_dev, self.min, self.max, self.count_normalized)

    @classmethod
    def cold_start(cls, global_mean: float) -> "EntityRatingStats":
        return cls(global_mean, global_mean, 0.0, global_mean, global_mean, 0.0)


@dataclass(frozen=True)
class ContentVector:
    genre_onehot: tuple
    decade_onehot: tuple
    movie_stats: EntityRatingStats
    user_stats: EntityRatingStats

    def values(self, strict_39: bool = False) -> tuple:
        values = self.genre_onehot + self.decade_onehot + self.movie_stats.as_tuple()
        if not strict_39:
            values += self.user_stats.as_tuple()
        return values


def genre_onehot(genres: Iterable[str]) -> tuple:
    genres = set(genres)
    unknown = genres - set(GENRES)
    if unknown:
        raise ValidationError(f"unknown genre labels {sorted(unknown)}")
    bits = [1 if label in genres else 0 for label in GENRES]
    bits.append(0 if genres else 1)
    return tuple(bits)


def decade_bin(year: int) -> int:
    return min(max(year // 10 - FIRST_DECADE // 10, 0), DECADES - 1)


def decade_onehot(release_year: Optional[int]) -> tuple:
    bits = [0] * DECADES
    if release_year is not None:
        bits[decade_bin(release_year)] = 1
    return tuple(bits)


def entity_rating_stats(ratings: Sequence[float], max_count: int, global_mean: float) -> EntityRatingStats:
    """
    Rating statistics of one user or one movie over its training ratings.

    Args:
        ratings: training ratings of the entity
        max_count: largest training rating count over entities of the same side
        global_mean: training mean, used for entities without ratings

    Returns:
        EntityRatingStats (population std, lower median)
    """
    values = np.sort(np.asarray(ratings, dtype=float))
    if values.size == 0:
        return EntityRatingStats.cold_start(global_mean)
    return EntityRatingStats(
        mean=float(values.mean()),
        median=float(values[(values.size - 1) // 2]),
        std_dev=float(values.std()),
        min=float(values[0]),
        max=float(values[-1]),
        count_normalized=values.size / max_count if max_count else 0.0,
    )


def entity_stats_table(ratings: pd.DataFrame, side: Side, prefix: Optional[str] = None) -> pd.DataFrame:
    """Vectorised entity_rating_stats for every entity of one side, indexed by entity id."""
    side = Side(side)
    prefix = prefix or ("user" if side is Side.USER else "movie")
    grouped = ratings.groupby(side.value)["rating"]
    table = pd.DataFrame({
        "rmean": grouped.mean(),
        "rmedian": grouped.quantile(0.5, interpolation="lower"),
        "rstd": grouped.std(ddof=0),
        "rmin": grouped.min(),
        "rmax": grouped.max(),
        "rcount": grouped.size().astype(float),
    })
    max_count = table["rcount"].max() if len(table) else 0
    if max_count:
        table["rcount"] = table["rcount"] / max_count
    table["rstd"] = table["rstd"].fillna(0.0)
    table.columns = stat_columns(prefix)
    return table


def movie_metadata_table(movies: List[MovieRecord]) -> pd.DataFrame:
    """Genre and decade one-hots per movie, indexed by movie id."""
    rows = [genre_onehot(m.genres) + decade_onehot(m.release_year) for m in movies]
    index = pd.Index([m.item for m in movies], name="item")
    table = pd.DataFrame(rows, index=index, columns=GENRE_COLUMNS + DECADE_COLUMNS, dtype=np.int8)
    if not index.is_unique:
        LOGGER.warning("duplicate movie ids in metadata; keeping the first record")
        table = table[~table.index.duplicated()]
    return table


def content_vector(movie: Optional[MovieRecord], movie_ratings: Sequence[float], user_ratings: Sequence[float],
                   max_movie_count: int, max_user_count: int, global_mean: float) -> ContentVector:
    genres = movie.genres if movie else ()
    year = movie.release_year if movie else None
    return ContentVector(
        genre_onehot(genres),
        decade_onehot(year),
        entity_rating_stats(movie_ratings, max_movie_count, global_mean),
        entity_rating_stats(user_ratings, max_user_count, global_mean),
    )


def missing_content_row(global_mean: float) -> pd.Series:
    """Content values of a row whose movie is missing from movies.csv and whose user and movie have no training ratings."""
    vector = content_vector(None, [], [], 0, 0, global_mean)
    return pd.Series(vector.values(), index=content_columns())
