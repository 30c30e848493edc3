import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from functions.errors import DomainError
from functions.linkstream import BipartiteGraph, LinkStream, Side

LOGGER = logging.getLogger(__name__)

DEGREE_COLUMNS = ["dG", "dmean", "dmax"]
DISCARDED_COLUMNS = ["dmin", "dstd"]
ICT_COLUMNS = ["ict_max", "ict_min", "ict_mean", "ict_std"]


@dataclass(frozen=True)
class DegreeFeatures:
    graph_degree: int
    mean_stream_degree: float
    max_stream_degree: int
    min_stream_degree: Optional[float] = None
    std_stream_degree: Optional[float] = None


@dataclass(frozen=True)
class InterContactStats:
    max: float
    min: float
    mean: float
    std: float

    @classmethod
    def sentinel(cls, span_length: float) -> "InterContactStats":
        return cls(span_length, span_length, span_length, span_length)


def _profile(codes: np.ndarray, begin: np.ndarray, end: np.ndarray):
    """
    Sweeps interval endpoints node by node.

    Returns one row per distinct (node, coordinate): the node code, the coordinate, the
    degree reached at that instant (links ending there still count) and the degree held
    until the node's next coordinate.
    """
    n = begin.size
    node = np.concatenate([codes, codes])
    coord = np.concatenate([begin, end])
    step = np.concatenate([np.ones(n, dtype=np.int64), -np.ones(n, dtype=np.int64)])
    opening = (step > 0).astype(np.int64)
    order = np.lexsort((coord, node))
    node, coord, step, opening = node[order], coord[order], step[order], opening[order]
    if node.size == 0:
        empty = np.array([], dtype=np.int64)
        return empty, np.array([], dtype=float), empty, empty
    boundary = np.ones(node.size, dtype=bool)
    boundary[1:] = (node[1:] != node[:-1]) | (coord[1:] != coord[:-1])
    starts = np.flatnonzero(boundary)
    net = np.add.reduceat(step, starts)
    opened = np.add.reduceat(opening, starts)
    # every node nets to zero, so the running sum restarts at each node
    held = np.cumsum(net)
    peak = held - net + opened
    return node[starts], coord[starts], peak, held


def _side_arrays(stream: LinkStream, side: Side):
    index = stream.index(side)
    return index.codes, index.begin, index.end


def degree_features(stream: LinkStream, graph: BipartiteGraph, node, side: Optional[Side] = None,
                    keep_discarded: bool = False) -> DegreeFeatures:
    """
    Degree features of one node.

    Args:
        stream: the link stream
        graph: its induced graph
        node: user or item
        side: node side, inferred when omitted
        keep_discarded: also compute min and std of the instantaneous degree

    Returns:
        DegreeFeatures; all zeros for an absent node
    """
    side = stream.resolve_side(node, side)
    code = stream.index(side).code(node) if side is not None else -1
    if code < 0:
        zero = 0.0 if keep_discarded else None
        return DegreeFeatures(0, 0.0, 0, zero, zero)
    _, begin, end = stream.index(side).slice(code)
    table = _degree_table(np.zeros(begin.size, dtype=np.int64), begin, end, 1, stream.span.length,
                          keep_discarded)
    row = table.iloc[0]
    return DegreeFeatures(
        graph.degree(node, side),
        float(row["dmean"]),
        int(row["dmax"]),
        float(row["dmin"]) if keep_discarded else None,
        float(row["dstd"]) if keep_discarded else None,
    )


def _degree_table(codes: np.ndarray, begin: np.ndarray, end: np.ndarray, n_nodes: int, span_length: float,
                  keep_discarded: bool) -> pd.DataFrame:
    lengths = np.bincount(codes, weights=(end - begin).astype(float), minlength=n_nodes)
    table = pd.DataFrame({"dmean": lengths / span_length})
    node, coord, peak, held = _profile(codes, begin, end)
    dmax = np.zeros(n_nodes, dtype=np.int64)
    np.maximum.at(dmax, node, peak)
    table["dmax"] = dmax
    if keep_discarded:
        following = np.append(coord[1:], coord[-1:])
        last = np.ones(node.size, dtype=bool)
        last[:-1] = node[1:] != node[:-1]
        seg = np.where(last, 0, following - coord).astype(float)
        second = np.bincount(node, weights=held.astype(float) ** 2 * seg, minlength=n_nodes) / span_length
        variance = np.maximum(second - table["dmean"].to_numpy() ** 2, 0.0)
        table["dstd"] = np.sqrt(variance)
        covered = np.bincount(node, weights=np.where(held > 0, seg, 0.0), minlength=n_nodes)
        lowest = np.full(n_nodes, np.inf)
        positive = seg > 0
        np.minimum.at(lowest, node[positive], held[positive].astype(float))
        full = covered >= span_length
        table["dmin"] = np.where(full & np.isfinite(lowest), lowest, 0.0)
    return table


def inter_contact_stats(times: Sequence[float], span_length: float) -> InterContactStats:
    """Stats of the gaps between consecutive event times; |T| for every field below two events."""
    values = np.sort(np.asarray(times, dtype=float))
    if values.size < 2:
        return InterContactStats.sentinel(span_length)
    gaps = np.diff(values)
    return InterContactStats(float(gaps.max()), float(gaps.min()), float(gaps.mean()), float(gaps.std()))


def inter_contact_table(events: pd.DataFrame, side: Side, span_length: float) -> pd.DataFrame:
    column = Side(side).value
    frame = events[[column, "time"]].sort_values([column, "time"], kind="mergesort")
    same = frame[column].eq(frame[column].shift()).to_numpy()
    gaps = frame["time"].diff().to_numpy()[same]
    owners = frame[column].to_numpy()[same]
    grouped = pd.Series(gaps.astype(float), index=owners).groupby(level=0)
    table = pd.DataFrame({
        "ict_max": grouped.max(),
        "ict_min": grouped.min(),
        "ict_mean": grouped.mean(),
        "ict_std": grouped.std(ddof=0).fillna(0.0),
    })
    nodes = pd.unique(frame[column])
    return table.reindex(nodes).fillna(span_length)


def node_feature_table(stream: LinkStream, graph: BipartiteGraph, side: Side,
                       keep_discarded: bool = False) -> pd.DataFrame:
    """
    Degree and inter-contact features of every node of one side, indexed by node id.

    Inter-contact times come from the stream's raw events (link begins when it has none).
    """
    side = Side(side)
    index = stream.index(side)
    labels = index.labels
    codes, begin, end = _side_arrays(stream, side)
    table = _degree_table(codes, begin, end, len(labels), stream.span.length, keep_discarded)
    table.index = labels
    degree = graph.user_degree if side is Side.USER else graph.item_degree
    table.insert(0, "dG", degree.reindex(labels).fillna(0).astype(np.int64).to_numpy())
    if stream.events is not None:
        events = stream.events
    else:
        events = stream.links.rename(columns={"begin": "time"})
    ict = inter_contact_table(events, side, stream.span.length)
    table = table.join(ict.reindex(labels).fillna(stream.span.length))
    columns = DEGREE_COLUMNS + (DISCARDED_COLUMNS if keep_discarded else []) + ICT_COLUMNS
    LOGGER.info(f"stream features for {len(table)} {side.value}s")
    return table[columns]


def edge_assortativity(graph: BipartiteGraph, a, b) -> float:
    """min/max of the endpoint degrees of edge ab; symmetric in its arguments."""
    if graph.has_edge(a, b):
        user, item = a, b
    elif graph.has_edge(b, a):
        user, item = b, a
    else:
        raise DomainError(f"({a!r}, {b!r}) is not an edge of the graph")
    du, di = graph.degree(user, Side.USER), graph.degree(item, Side.ITEM)
    return min(du, di) / max(du, di)


def pair_assortativity(user_degree: np.ndarray, item_degree: np.ndarray) -> np.ndarray:
    """Same ratio for arbitrary pairs; 0 when either endpoint has no neighbour."""
    low = np.minimum(user_degree, item_degree).astype(float)
    high = np.maximum(user_degree, item_degree).astype(float)
    return np.divide(low, high, out=np.zeros_like(low), where=low > 0)
