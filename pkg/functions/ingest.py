import io
import logging
import os
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Union

import numpy as np
import pandas as pd

from functions.errors import ConfigurationError, MalformedRowError, StreamRecError, ValidationError
from functions.linkstream import Event, EventKind, events_frame

LOGGER = logging.getLogger(__name__)

# alphabetical; one-hot columns follow this order
GENRES = (
    "Action", "Adventure", "Animation", "Children", "Comedy", "Crime", "Documentary", "Drama",
    "Fantasy", "Film-Noir", "Horror", "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller",
    "War", "Western",
)
NO_GENRES = "(no genres listed)"
MIN_YEAR, MAX_YEAR = 1850, 2100

RATINGS_HEADER = ["userId", "movieId", "rating", "timestamp"]
MOVIES_HEADER = ["movieId", "title", "genres"]
TAGS_HEADER = ["userId", "movieId", "tag", "timestamp"]

YEAR_PATTERN = re.compile(r"\((\d{4})\)\s*$")
# "line N" counts from 1; "row N" counts from 0 with the header as row 0
LINE_PATTERN = re.compile(r"(line|row) (\d+)")

Source = Union[str, os.PathLike, io.IOBase]


@dataclass(frozen=True)
class MovieRecord:
    item: int
    title: str
    release_year: Optional[int] = None
    genres: FrozenSet[str] = frozenset()

    def __post_init__(self):
        if self.release_year is not None and not MIN_YEAR <= self.release_year <= MAX_YEAR:
            raise ValidationError(f"movie {self.item}: release year {self.release_year} out of range")
        unknown = set(self.genres) - set(GENRES)
        if unknown:
            raise ValidationError(f"movie {self.item}: unknown genres {sorted(unknown)}")


@dataclass(frozen=True, eq=False)
class FoldAssignment:
    """Fold id of every rating event, aligned with the rating frame's row order."""
    fold_count: int
    assignment: np.ndarray
    seed: int = 0

    def fold_sizes(self) -> List[int]:
        return np.bincount(self.assignment, minlength=self.fold_count).tolist()

    def test_mask(self, fold_id: int) -> np.ndarray:
        return self.assignment == fold_id

    def train_mask(self, fold_id: int) -> np.ndarray:
        return self.assignment != fold_id


@dataclass(eq=False)
class Dataset:
    ratings: pd.DataFrame
    movies: List[MovieRecord] = field(default_factory=list)
    tags: Optional[pd.DataFrame] = None

    @property
    def events(self) -> pd.DataFrame:
        """Ratings followed by tags, the input of a whole-data link stream."""
        if self.tags is None or self.tags.empty:
            return self.ratings
        return pd.concat([self.ratings, self.tags], ignore_index=True)


def _source_name(source: Source) -> str:
    return str(source) if isinstance(source, (str, os.PathLike)) else getattr(source, "name", "<stream>")


def _read_table(source: Source, header: List[str], name: str, allow_empty: bool = False) -> pd.DataFrame:
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        if allow_empty:
            return pd.DataFrame({column: pd.Series(dtype=str) for column in header})
        raise MalformedRowError(name, 1, f"missing header {','.join(header)}")
    except pd.errors.ParserError as e:
        match = LINE_PATTERN.search(str(e))
        line = 0
        if match:
            line = int(match.group(2)) + (1 if match.group(1) == "row" else 0)
        raise MalformedRowError(name, line, str(e)) from e
    if list(frame.columns) != header:
        raise MalformedRowError(name, 1, f"expected header {','.join(header)}, got {','.join(frame.columns)}")
    return frame


def _integer_column(frame: pd.DataFrame, column: str, name: str) -> np.ndarray:
    values = pd.to_numeric(frame[column], errors="coerce")
    bad = values.isna() | (values != values.round())
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise MalformedRowError(name, row + 2, f"{column} {frame[column].iloc[row]!r} is not an integer")
    return values.astype(np.int64).to_numpy()


def parse_ratings(source: Source) -> pd.DataFrame:
    """
    Reads a MovieLens ratings.csv.

    Args:
        source: path or text buffer with header userId,movieId,rating,timestamp

    Returns:
        event frame (time, user, item, kind, rating), one Rating event per row
    """
    name = _source_name(source)
    raw = _read_table(source, RATINGS_HEADER, name)
    users = _integer_column(raw, "userId", name)
    items = _integer_column(raw, "movieId", name)
    times = _integer_column(raw, "timestamp", name)
    ratings = pd.to_numeric(raw["rating"], errors="coerce").to_numpy()
    if np.isnan(ratings).any():
        row = int(np.flatnonzero(np.isnan(ratings))[0])
        raise MalformedRowError(name, row + 2, f"rating {raw['rating'].iloc[row]!r} is not a number")
    doubled = ratings * 2
    off_scale = (doubled < 1) | (doubled > 10) | (doubled != np.round(doubled))
    if off_scale.any():
        row = int(np.flatnonzero(off_scale)[0])
        raise ValidationError(f"{name}: line {row + 2}: rating {ratings[row]} is outside {{0.5, ..., 5.0}}")
    frame = pd.DataFrame({
        "time": times,
        "user": users,
        "item": items,
        "kind": EventKind.RATING.value,
        "rating": ratings.astype(float),
    })
    LOGGER.info(f"{name}: {len(frame)} ratings, {frame['user'].nunique()} users, {frame['item'].nunique()} movies")
    return frame


def parse_tags(source: Source) -> pd.DataFrame:
    """Reads tags.csv; the tag text is dropped, duplicates are kept."""
    name = _source_name(source)
    raw = _read_table(source, TAGS_HEADER, name, allow_empty=True)
    frame = pd.DataFrame({
        "time": _integer_column(raw, "timestamp", name),
        "user": _integer_column(raw, "userId", name),
        "item": _integer_column(raw, "movieId", name),
        "kind": EventKind.TAG.value,
        "rating": np.nan,
    })
    LOGGER.info(f"{name}: {len(frame)} tag events")
    return frame


def parse_title_year(title: str) -> Optional[int]:
    match = YEAR_PATTERN.search(title)
    if not match:
        return None
    year = int(match.group(1))
    return year if MIN_YEAR <= year <= MAX_YEAR else None


def parse_genres(text: str) -> FrozenSet[str]:
    if not text or text == NO_GENRES:
        return frozenset()
    return frozenset(label for label in text.split("|") if label)


def parse_movies(source: Source) -> List[MovieRecord]:
    """Reads movies.csv: title kept verbatim, year from a trailing "(YYYY)", genres split on "|"."""
    name = _source_name(source)
    raw = _read_table(source, MOVIES_HEADER, name)
    items = _integer_column(raw, "movieId", name)
    vocabulary = set(GENRES)
    dropped = 0
    movies = []
    for item, title, genres in zip(items.tolist(), raw["title"].tolist(), raw["genres"].tolist()):
        labels = parse_genres(genres)
        kept = labels & vocabulary
        dropped += len(labels) - len(kept)
        movies.append(MovieRecord(item, title, parse_title_year(title), frozenset(kept)))
    if dropped:
        LOGGER.warning(f"{name}: dropped {dropped} genre labels outside the {len(GENRES)}-genre vocabulary")
    LOGGER.info(f"{name}: {len(movies)} movies")
    return movies


def serialize_ratings(events: Union[pd.DataFrame, Iterable[Event]]) -> str:
    frame = events_frame(events)
    if "kind" in frame.columns:
        frame = frame[frame["kind"] == EventKind.RATING.value]
    buffer = io.StringIO()
    buffer.write(",".join(RATINGS_HEADER) + "\n")
    for row in frame.itertuples(index=False):
        buffer.write(f"{row.user},{row.item},{float(row.rating):.1f},{row.time}\n")
    return buffer.getvalue()


def kfold_split(ratings: Union[pd.DataFrame, Iterable[Event]], k: int, seed: int) -> FoldAssignment:
    """
    Uniform random split of rating events into k folds of sizes within one of each other.

    Tag events are not assigned: they stay on the training side of every fold.
    """
    frame = events_frame(ratings)
    if "kind" in frame.columns and (frame["kind"] != EventKind.RATING.value).any():
        raise ValidationError("kfold_split takes rating events only")
    n = len(frame)
    if k < 2:
        raise ConfigurationError(f"fold count must be at least 2, got {k}")
    if k > n:
        raise ConfigurationError(f"fold count {k} exceeds the number of rating events ({n})")
    rng = np.random.default_rng(seed)
    assignment = np.empty(n, dtype=np.int64)
    assignment[rng.permutation(n)] = np.arange(n) % k
    folds = FoldAssignment(k, assignment, seed)
    LOGGER.info(f"split {n} ratings into {k} folds of sizes {folds.fold_sizes()} (seed {seed})")
    return folds


def load_dataset(data_dir: str, include_tags: bool = True) -> Dataset:
    ratings_path = os.path.join(data_dir, "ratings.csv")
    movies_path = os.path.join(data_dir, "movies.csv")
    tags_path = os.path.join(data_dir, "tags.csv")
    if not os.path.exists(ratings_path):
        raise StreamRecError(f"{ratings_path} not found (try `streamrec download --data-dir {data_dir}`)")
    ratings = parse_ratings(ratings_path)
    movies = parse_movies(movies_path) if os.path.exists(movies_path) else []
    tags = None
    if include_tags and os.path.exists(tags_path):
        tags = parse_tags(tags_path)
    return Dataset(ratings, movies, tags)


def dataset_report(dataset: Dataset) -> Dict[str, int]:
    ratings = dataset.ratings
    report = {
        "ratings": len(ratings),
        "users": int(ratings["user"].nunique()),
        "rated_movies": int(ratings["item"].nunique()),
        "movies": len(dataset.movies),
        "tags": 0 if dataset.tags is None else len(dataset.tags),
        "first_time": int(ratings["time"].min()) if len(ratings) else 0,
        "last_time": int(ratings["time"].max()) if len(ratings) else 0,
    }
    return report
