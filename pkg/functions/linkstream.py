import io
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Hashable, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from functions.errors import ConfigurationError, DomainError, EventOutsideSpanError, ValidationError

LOGGER = logging.getLogger(__name__)

EVENT_COLUMNS = ["time", "user", "item", "kind", "rating"]
LINK_COLUMNS = ["user", "item", "begin", "end"]


class EventKind(str, Enum):
    RATING = "rating"
    TAG = "tag"


class Side(str, Enum):
    USER = "user"
    ITEM = "item"

    @property
    def other(self) -> "Side":
        return Side.ITEM if self is Side.USER else Side.USER


def valid_rating(value) -> bool:
    doubled = value * 2
    return 1 <= doubled <= 10 and float(doubled).is_integer()


@dataclass(frozen=True)
class Event:
    time: int
    user: Hashable
    item: Hashable
    kind: EventKind = EventKind.RATING
    rating: Optional[float] = None

    def __post_init__(self):
        if (self.rating is not None) != (self.kind is EventKind.RATING):
            raise ValidationError(f"rating must be present iff kind is rating: {self}")
        if self.rating is not None and not valid_rating(self.rating):
            raise ValidationError(f"rating {self.rating} is not a multiple of 0.5 in [0.5, 5.0]")


@dataclass(frozen=True)
class Interval:
    """A time interval [begin, end). Point queries treat the end as reached (see contains)."""
    begin: float
    end: float

    def __post_init__(self):
        if not self.begin < self.end:
            raise ValidationError(f"interval needs begin < end, got [{self.begin}, {self.end})")

    @property
    def length(self) -> float:
        return self.end - self.begin

    def contains(self, t) -> bool:
        return self.begin <= t <= self.end

    def covers(self, other: "Interval") -> bool:
        return self.begin <= other.begin and other.end <= self.end

    def __str__(self):
        return f"[{self.begin},{self.end})"


@dataclass(frozen=True)
class Link:
    user: Hashable
    item: Hashable
    interval: Interval


def events_frame(events: Union[pd.DataFrame, Iterable[Event]]) -> pd.DataFrame:
    """Column-wise view of events: time, user, item, kind, rating."""
    if isinstance(events, pd.DataFrame):
        missing = {"time", "user", "item"} - set(events.columns)
        if missing:
            raise ValidationError(f"event frame lacks columns {sorted(missing)}")
        return events
    rows = [(e.time, e.user, e.item, e.kind.value, e.rating) for e in events]
    frame = pd.DataFrame(rows, columns=EVENT_COLUMNS)
    frame["rating"] = frame["rating"].astype(float)
    return frame


def iter_events(frame: pd.DataFrame) -> Iterator[Event]:
    has_kind = "kind" in frame.columns
    has_rating = "rating" in frame.columns
    for row in frame.itertuples(index=False):
        kind = EventKind(row.kind) if has_kind else EventKind.RATING
        rating = float(row.rating) if has_rating and kind is EventKind.RATING else None
        yield Event(int(row.time), row.user, row.item, kind, rating)


def _merge_intervals(frame: pd.DataFrame) -> pd.DataFrame:
    # frame: user, item, begin, end; overlapping or adjacent intervals of a pair are fused
    if frame.empty:
        return pd.DataFrame({c: pd.Series(dtype=frame[c].dtype) for c in LINK_COLUMNS})
    frame = frame.sort_values(["user", "item", "begin"], kind="mergesort").reset_index(drop=True)
    new_pair = (frame["user"].ne(frame["user"].shift())) | (frame["item"].ne(frame["item"].shift()))
    reach = frame.groupby(["user", "item"], sort=False)["end"].cummax().shift()
    run_start = new_pair | (frame["begin"] > reach)
    run_id = run_start.cumsum()
    merged = frame.groupby(run_id, sort=False).agg(
        user=("user", "first"), item=("item", "first"), begin=("begin", "min"), end=("end", "max"))
    return merged.reset_index(drop=True)[LINK_COLUMNS]


class _SideIndex:
    """Links of one side grouped by node: contiguous slices over (node, partner, begin) order."""

    def __init__(self, links: pd.DataFrame, side: Side, labels: pd.Index, partner_labels: pd.Index):
        column, partner = side.value, side.other.value
        self.labels = labels
        self.partner_labels = partner_labels
        codes = labels.get_indexer(links[column])
        partner_codes = partner_labels.get_indexer(links[partner])
        begin = links["begin"].to_numpy()
        order = np.lexsort((begin, partner_codes, codes))
        self.codes = codes[order]
        self.partners = partner_codes[order]
        self.begin = begin[order]
        self.end = links["end"].to_numpy()[order]
        self.offsets = np.searchsorted(self.codes, np.arange(len(labels) + 1))

    def code(self, node) -> int:
        loc = self.labels.get_indexer([node])[0]
        return int(loc)

    def slice(self, code: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        lo, hi = self.offsets[code], self.offsets[code + 1]
        return self.partners[lo:hi], self.begin[lo:hi], self.end[lo:hi]

    def pair(self, code: int, partner_code: int) -> Tuple[np.ndarray, np.ndarray]:
        partners, begin, end = self.slice(code)
        lo = np.searchsorted(partners, partner_code, side="left")
        hi = np.searchsorted(partners, partner_code, side="right")
        return begin[lo:hi], end[lo:hi]


@dataclass(frozen=True, eq=False)
class LinkStream:
    """
    Bipartite link stream: a span, users, items and maximal links per (user, item) pair.

    Immutable once built; queries are read-only and may run from any number of threads.
    """
    span: Interval
    delta: float
    links: pd.DataFrame
    events: Optional[pd.DataFrame] = None

    @classmethod
    def from_links(cls, links: Iterable, span: Interval, delta: float = 1) -> "LinkStream":
        """
        Loads interval links directly.

        Args:
            links: Link objects or (begin, end, user, item) tuples
            span: time span of the stream
            delta: expansion duration recorded on the stream

        Returns:
            LinkStream with merged, span-clipped links
        """
        rows = []
        for link in links:
            if isinstance(link, Link):
                rows.append((link.user, link.item, link.interval.begin, link.interval.end))
            else:
                b, e, u, i = link
                rows.append((u, i, b, e))
        frame = pd.DataFrame(rows, columns=LINK_COLUMNS)
        if frame.empty:
            frame = frame.astype({"begin": float, "end": float})
        return cls(span, delta, _clip_and_merge(frame, span))

    @cached_property
    def users(self) -> frozenset:
        return frozenset(self.links["user"].unique())

    @cached_property
    def items(self) -> frozenset:
        return frozenset(self.links["item"].unique())

    @property
    def n_links(self) -> int:
        return len(self.links)

    @cached_property
    def user_labels(self) -> pd.Index:
        return pd.Index(pd.unique(self.links["user"])).sort_values()

    @cached_property
    def item_labels(self) -> pd.Index:
        return pd.Index(pd.unique(self.links["item"])).sort_values()

    @cached_property
    def by_user(self) -> _SideIndex:
        return _SideIndex(self.links, Side.USER, self.user_labels, self.item_labels)

    @cached_property
    def by_item(self) -> _SideIndex:
        return _SideIndex(self.links, Side.ITEM, self.item_labels, self.user_labels)

    def index(self, side: Side) -> _SideIndex:
        return self.by_user if side is Side.USER else self.by_item

    def pair_intervals(self, user, item) -> List[Interval]:
        u, i = self.by_user.code(user), self.item_labels.get_indexer([item])[0]
        if u < 0 or i < 0:
            return []
        begin, end = self.by_user.pair(u, i)
        return [Interval(b, e) for b, e in zip(begin.tolist(), end.tolist())]

    def iter_links(self) -> Iterator[Link]:
        for row in self.links.itertuples(index=False):
            yield Link(row.user, row.item, Interval(row.begin, row.end))

    def resolve_side(self, node, side: Optional[Side] = None) -> Optional[Side]:
        if side is not None:
            return Side(side)
        in_users, in_items = node in self.users, node in self.items
        if in_users and in_items:
            raise DomainError(f"node {node!r} exists on both sides; pass side explicitly")
        if in_users:
            return Side.USER
        if in_items:
            return Side.ITEM
        return None


def _clip_and_merge(frame: pd.DataFrame, span: Interval) -> pd.DataFrame:
    frame = frame.copy()
    frame["begin"] = frame["begin"].clip(lower=span.begin)
    frame["end"] = frame["end"].clip(upper=span.end)
    frame = frame[frame["begin"] < frame["end"]]
    return _merge_intervals(frame)


def build_stream(events: Union[pd.DataFrame, Iterable[Event]], delta: float, span: Interval) -> LinkStream:
    """
    Expands every event (t, u, i) to presence over [t, t + delta), clipped to the span,
    and fuses overlapping or adjacent presences of one pair into maximal links.
    """
    if delta is None or delta <= 0:
        raise ConfigurationError(f"delta must be positive, got {delta}")
    frame = events_frame(events)
    times = frame["time"].to_numpy()
    outside = (times < span.begin) | (times >= span.end)
    if outside.any():
        row = frame[outside].iloc[0]
        raise EventOutsideSpanError((row["time"], row["user"], row["item"]), span)
    presence = pd.DataFrame({
        "user": frame["user"].to_numpy(),
        "item": frame["item"].to_numpy(),
        "begin": times,
        "end": times + delta,
    })
    links = _clip_and_merge(presence, span)
    LOGGER.info(f"link stream: {len(frame)} events -> {len(links)} links (delta={delta}s, span={span})")
    raw = frame[["time", "user", "item"]].reset_index(drop=True)
    return LinkStream(span, delta, links, raw)


def data_span(events: pd.DataFrame, delta: float) -> Interval:
    """Span covering every event plus the presence of the latest one."""
    if events.empty:
        raise DomainError("cannot derive a span from zero events")
    return Interval(int(events["time"].min()), int(events["time"].max()) + delta)


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Static graph induced by a stream; edges kept column-wise (user, item)."""
    users: frozenset
    items: frozenset
    edges: pd.DataFrame

    @cached_property
    def user_degree(self) -> pd.Series:
        return self.edges["user"].value_counts()

    @cached_property
    def item_degree(self) -> pd.Series:
        return self.edges["item"].value_counts()

    @cached_property
    def _edge_index(self) -> pd.MultiIndex:
        return pd.MultiIndex.from_frame(self.edges[["user", "item"]])

    def degree(self, node, side: Side) -> int:
        table = self.user_degree if Side(side) is Side.USER else self.item_degree
        return int(table.get(node, 0))

    def has_edge(self, user, item) -> bool:
        return (user, item) in self._edge_index

    def edge_set(self) -> set:
        return set(zip(self.edges["user"].tolist(), self.edges["item"].tolist()))


def induced_graph(stream: LinkStream) -> BipartiteGraph:
    edges = stream.links[["user", "item"]].drop_duplicates().reset_index(drop=True)
    return BipartiteGraph(stream.users, stream.items, edges)


def instantaneous_degree(stream: LinkStream, node, t, side: Optional[Side] = None) -> int:
    """Number of distinct partners of node linked at time t."""
    if not stream.span.contains(t):
        raise DomainError(f"time {t} is outside the span {stream.span}")
    side = stream.resolve_side(node, side)
    if side is None:
        return 0
    index = stream.index(side)
    code = index.code(node)
    if code < 0:
        return 0
    partners, begin, end = index.slice(code)
    active = (begin <= t) & (t <= end)
    return int(np.unique(partners[active]).size)


def presence_times(source: Union[LinkStream, pd.DataFrame], node, side: Optional[Side] = None) -> Tuple:
    """
    Ordered event times of node, duplicates kept.

    Args:
        source: a LinkStream or a raw event frame
        node: user or item identifier
        side: node side; inferred when omitted

    Returns:
        tuple of times, ascending; empty for an unknown node
    """
    if isinstance(source, LinkStream):
        side = source.resolve_side(node, side)
        if side is None:
            return ()
        if source.events is not None:
            frame, column = source.events, "time"
        else:
            frame, column = source.links, "begin"
    else:
        frame, column = events_frame(source), "time"
        if side is None:
            in_users = bool((frame["user"] == node).any())
            in_items = bool((frame["item"] == node).any())
            if in_users and in_items:
                raise DomainError(f"node {node!r} exists on both sides; pass side explicitly")
            side = Side.USER if in_users else Side.ITEM
    times = frame.loc[frame[Side(side).value] == node, column].to_numpy()
    return tuple(np.sort(times, kind="mergesort").tolist())


def format_stream(stream: LinkStream) -> str:
    """Text dump, one "user item begin end" line per link, sorted."""
    buffer = io.StringIO()
    links = stream.links.sort_values(LINK_COLUMNS, kind="mergesort")
    for row in links.itertuples(index=False):
        buffer.write(f"{row.user} {row.item} {_fmt_time(row.begin)} {_fmt_time(row.end)}\n")
    return buffer.getvalue()


def parse_stream(text: str, span: Interval, delta: float = 1, id_type=str) -> LinkStream:
    links = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValidationError(f"link line {number}: expected 'user item begin end', got {line!r}")
        u, i, b, e = parts
        links.append((_parse_time(b), _parse_time(e), id_type(u), id_type(i)))
    return LinkStream.from_links(links, span, delta)


def _fmt_time(value) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def _parse_time(text: str):
    value = float(text)
    return int(value) if value.is_integer() else value
