import math

import numpy as np
import pandas as pd
import pytest

from functions.errors import DomainError
from functions.linkstream import (BipartiteGraph, Interval, LinkStream, Side, induced_graph, instantaneous_degree,
                                  presence_times)
from functions.pipeline import stream_columns
from functions.stream_features import (InterContactStats, degree_features, edge_assortativity, inter_contact_stats,
                                       inter_contact_table, node_feature_table, pair_assortativity)


@pytest.mark.parametrize("node,expected", [
    ("u", (2, 0.7, 2)),
    ("v", (2, 0.6, 2)),
    ("x", (2, 1.1, 2)),
    ("y", (2, 0.2, 1)),
])
def test_toy_degree_features(toy_stream, node, expected):
    features = degree_features(toy_stream, induced_graph(toy_stream), node)
    assert (features.graph_degree, features.mean_stream_degree, features.max_stream_degree) == expected
    assert features.min_stream_degree is None and features.std_stream_degree is None


def test_absent_node_has_zero_degree_features(toy_stream):
    features = degree_features(toy_stream, induced_graph(toy_stream), "nobody")
    assert (features.graph_degree, features.mean_stream_degree, features.max_stream_degree) == (0, 0.0, 0)


def test_discarded_degree_statistics(toy_stream):
    features = degree_features(toy_stream, induced_graph(toy_stream), "u", keep_discarded=True)
    assert features.min_stream_degree == 0.0
    assert features.std_stream_degree == pytest.approx(math.sqrt(0.21))


def test_min_degree_of_a_node_present_throughout():
    stream = LinkStream.from_links([(0, 10, "a", "x"), (2, 4, "a", "y")], Interval(0, 10))
    features = degree_features(stream, induced_graph(stream), "a", keep_discarded=True)
    assert features.min_stream_degree == 1.0
    assert features.max_stream_degree == 2
    assert features.mean_stream_degree == 1.2


@pytest.mark.parametrize("side", [Side.USER, Side.ITEM])
def test_node_table_matches_per_node_features(toy_stream, side):
    graph = induced_graph(toy_stream)
    table = node_feature_table(toy_stream, graph, side, keep_discarded=True)
    for node in table.index:
        features = degree_features(toy_stream, graph, node, side, keep_discarded=True)
        row = table.loc[node]
        assert row["dG"] == features.graph_degree
        assert row["dmean"] == features.mean_stream_degree
        assert row["dmax"] == features.max_stream_degree
        assert row["dmin"] == pytest.approx(features.min_stream_degree)
        assert row["dstd"] == pytest.approx(features.std_stream_degree)
        ict = inter_contact_stats(presence_times(toy_stream, node, side), toy_stream.span.length)
        assert [row["ict_max"], row["ict_min"], row["ict_mean"], row["ict_std"]] == pytest.approx(
            [ict.max, ict.min, ict.mean, ict.std])


def test_node_table_columns(toy_stream):
    table = node_feature_table(toy_stream, induced_graph(toy_stream), Side.USER)
    assert list(table.columns) == ["dG", "dmean", "dmax", "ict_max", "ict_min", "ict_mean", "ict_std"]


def test_max_degree_sweep_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(50):
        links = []
        for _ in range(rng.integers(1, 11)):
            b = int(rng.integers(0, 18))
            links.append((b, b + int(rng.integers(1, 5)), f"u{rng.integers(3)}", f"i{rng.integers(3)}"))
        stream = LinkStream.from_links(links, Interval(0, 20))
        graph = induced_graph(stream)
        for side in Side:
            table = node_feature_table(stream, graph, side)
            for node in table.index:
                brute = max(instantaneous_degree(stream, node, t, side) for t in range(0, 21))
                assert table.loc[node, "dmax"] == brute
                assert brute <= table.loc[node, "dG"]


def test_mean_degree_times_span_is_summed_length(toy_stream):
    table = node_feature_table(toy_stream, induced_graph(toy_stream), Side.ITEM)
    assert table.loc["x", "dmean"] == 11 / 10
    assert table.loc["y", "dmean"] == 2 / 10


def star_max_degree(intervals):
    links = [(b, e, "u", f"i{n}") for n, (b, e) in enumerate(intervals)]
    stream = LinkStream.from_links(links, Interval(0, 10))
    return degree_features(stream, induced_graph(stream), "u").max_stream_degree


def test_max_degree_counts_touching_links():
    assert star_max_degree([(0, 2), (2, 4), (5, 6)]) == 2
    assert star_max_degree([(0, 5), (1, 2), (1, 3)]) == 3
    assert star_max_degree([(0, 1), (3, 4)]) == 1


@pytest.mark.parametrize("times,expected", [
    ((1, 3, 7), InterContactStats(4, 2, 3, 1)),
    ((5, 5, 5), InterContactStats(0, 0, 0, 0)),
    ((7, 1, 3), InterContactStats(4, 2, 3, 1)),
])
def test_inter_contact_stats(times, expected):
    assert inter_contact_stats(times, 100) == expected


def test_inter_contact_sentinel():
    assert inter_contact_stats((4,), 10) == InterContactStats(10, 10, 10, 10)
    assert inter_contact_stats((), 10) == InterContactStats.sentinel(10)


def test_inter_contact_table_matches_per_node():
    events = pd.DataFrame({"time": [1, 3, 7, 4, 5, 5], "user": ["a", "a", "a", "b", "c", "c"],
                           "item": ["x", "y", "x", "x", "y", "y"]})
    table = inter_contact_table(events, Side.USER, 50)
    assert table.loc["a"].tolist() == [4, 2, 3, 1]
    assert table.loc["b"].tolist() == [50, 50, 50, 50]
    assert table.loc["c"].tolist() == [0, 0, 0, 0]


def test_toy_assortativity(toy_stream):
    graph = induced_graph(toy_stream)
    for user, item in graph.edge_set():
        assert edge_assortativity(graph, user, item) == 1.0
        assert edge_assortativity(graph, item, user) == 1.0


def test_assortativity_ratio():
    edges = [("a", "i1"), ("a", "i2"), ("a", "i3")] + [(u, "i1") for u in "bcdef"]
    graph = BipartiteGraph(frozenset("abcdef"), frozenset({"i1", "i2", "i3"}),
                           pd.DataFrame(edges, columns=["user", "item"]))
    assert edge_assortativity(graph, "a", "i1") == 0.5
    assert edge_assortativity(graph, "i1", "a") == 0.5


def test_assortativity_of_non_edge():
    stream = LinkStream.from_links([(0, 1, "u", "x"), (0, 1, "v", "y")], Interval(0, 2))
    with pytest.raises(DomainError):
        edge_assortativity(induced_graph(stream), "u", "y")


def test_pair_assortativity():
    result = pair_assortativity(np.array([2, 0, 3]), np.array([2, 5, 6]))
    assert result.tolist() == [1.0, 0.0, 0.5]


def test_stream_block_width():
    assert len(stream_columns()) == 21
    assert len(stream_columns(keep_discarded=True)) == 25
