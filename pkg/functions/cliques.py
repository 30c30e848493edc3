import io
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from functions.errors import ConfigurationError, DomainError, ValidationError
from functions.linkstream import Interval, LinkStream, Side

LOGGER = logging.getLogger(__name__)

CLIQUE_COLUMNS = ["clq_balance", "clq_duration", "clq_fraction"]
TIME_STEP = 1


@dataclass(frozen=True)
class Clique:
    user_set: frozenset
    item_set: frozenset
    interval: Interval

    def __post_init__(self):
        if not self.user_set or not self.item_set:
            raise ValidationError("a clique needs at least one user and one item")

    @property
    def balancedness(self) -> float:
        a, b = len(self.user_set), len(self.item_set)
        return min(a, b) / max(a, b)

    @property
    def key(self):
        return (self.interval.begin, self.interval.end, tuple(sorted(self.user_set)), tuple(sorted(self.item_set)))

    def contains(self, node, side: Optional[Side] = None) -> bool:
        if side is None:
            return node in self.user_set or node in self.item_set
        return node in (self.user_set if Side(side) is Side.USER else self.item_set)

    def __str__(self):
        b, e = _fmt(self.interval.begin), _fmt(self.interval.end)
        users = ",".join(str(u) for u in sorted(self.user_set))
        items = ",".join(str(i) for i in sorted(self.item_set))
        return f"{b} {e} | {users} | {items}"


@dataclass(frozen=True)
class CliqueFeatureSet:
    balancedness: float = 0.0
    avg_norm_duration: float = 0.0
    clique_fraction: float = 0.0


def _fmt(value) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def _codes(stream: LinkStream, users: Iterable, items: Iterable) -> Optional[Tuple[List[int], List[int]]]:
    u = stream.user_labels.get_indexer(list(users))
    i = stream.item_labels.get_indexer(list(items))
    if (u < 0).any() or (i < 0).any():
        return None
    return u.tolist(), i.tolist()


def _pair_covers(stream: LinkStream, u: int, i: int, b, e) -> bool:
    begin, end = stream.by_user.pair(u, i)
    return bool(((begin <= b) & (e <= end)).any())


def _all_covered(stream: LinkStream, users: Sequence[int], items: Sequence[int], b, e) -> bool:
    return all(_pair_covers(stream, u, i, b, e) for u in users for i in items)


def is_clique(stream: LinkStream, user_set: Iterable, item_set: Iterable, interval: Interval) -> bool:
    """True iff every (user, item) pair has one stored link covering the whole interval."""
    items = list(item_set)
    return all(any(link.covers(interval) for link in stream.pair_intervals(user, item))
               for user in user_set for item in items)


def _covering_partners(stream: LinkStream, side: Side, anchors: Sequence[int], b, e) -> set:
    """Nodes of the other side whose links with every anchor cover [b, e]."""
    index = stream.index(side)
    common = None
    for anchor in anchors:
        partners, begin, end = index.slice(anchor)
        found = set(partners[(begin <= b) & (e <= end)].tolist())
        common = found if common is None else common & found
        if not common:
            return set()
    return common


def is_maximal(stream: LinkStream, clique: Clique, step=TIME_STEP) -> bool:
    """
    True iff no single user or item can join the clique and neither end of its interval
    can move out by `step` without breaking it.
    """
    codes = _codes(stream, clique.user_set, clique.item_set)
    b, e = clique.interval.begin, clique.interval.end
    if codes is None or not _all_covered(stream, codes[0], codes[1], b, e):
        raise DomainError(f"not a clique of the stream: {clique}")
    users, items = codes
    if _covering_partners(stream, Side.ITEM, items, b, e) - set(users):
        return False
    if _covering_partners(stream, Side.USER, users, b, e) - set(items):
        return False
    if b - step >= stream.span.begin and _all_covered(stream, users, items, b - step, e):
        return False
    if e + step <= stream.span.end and _all_covered(stream, users, items, b, e + step):
        return False
    return True


def _intersect(a: List[Tuple], b: List[Tuple]) -> List[Tuple]:
    # both sorted and disjoint; keeps positive-length overlaps only
    out, x, y = [], 0, 0
    while x < len(a) and y < len(b):
        lo, hi = max(a[x][0], b[y][0]), min(a[x][1], b[y][1])
        if lo < hi:
            out.append((lo, hi))
        if a[x][1] < b[y][1]:
            x += 1
        else:
            y += 1
    return out


class _Sampler:

    def __init__(self, stream: LinkStream, balance_threshold: float, stop_probability: float):
        self.stream = stream
        self.threshold = balance_threshold
        self.stop_probability = stop_probability
        self.seed_users = stream.user_labels.get_indexer(stream.links["user"])
        self.seed_items = stream.item_labels.get_indexer(stream.links["item"])
        self.seed_begin = stream.links["begin"].to_numpy()
        self.seed_end = stream.links["end"].to_numpy()

    def _pieces(self, side: Side, node: int, partners: Sequence[int], b, e) -> List[Tuple]:
        index = self.stream.index(side)
        pieces = [(b, e)]
        for partner in partners:
            begin, end = index.pair(node, partner)
            pieces = _intersect(pieces, list(zip(begin.tolist(), end.tolist())))
            if not pieces:
                break
        return pieces

    def _candidates(self, side: Side, members: List[int], partners: List[int], b, e) -> List[Tuple]:
        # nodes of `side` that overlap [b, e] with every partner, one entry per overlap piece
        anchor_partners, begin, end = self.stream.index(side.other).slice(partners[0])
        overlap = np.maximum(begin, b) < np.minimum(end, e)
        taken = set(members)
        found = []
        for node in np.unique(anchor_partners[overlap]).tolist():
            if node in taken:
                continue
            for piece in self._pieces(side, node, partners, b, e):
                found.append((side, node, piece))
        return found

    @staticmethod
    def _balance_after(users: List[int], items: List[int], side: Side) -> float:
        a, b = len(users) + (side is Side.USER), len(items) + (side is Side.ITEM)
        return min(a, b) / max(a, b)

    def trial(self, seed: int, trial: int) -> Optional[Tuple]:
        rng = np.random.default_rng([seed, trial])
        k = int(rng.integers(self.seed_users.size))
        users, items = [int(self.seed_users[k])], [int(self.seed_items[k])]
        b, e = self.seed_begin[k].item(), self.seed_end[k].item()
        while True:
            candidates = (self._candidates(Side.USER, users, items, b, e)
                          + self._candidates(Side.ITEM, items, users, b, e))
            if not candidates:
                break
            free = any(piece == (b, e) for _, _, piece in candidates)
            balance = min(len(users), len(items)) / max(len(users), len(items))
            if not free and balance >= self.threshold and rng.random() < self.stop_probability:
                break
            # majority additions are dropped only while they would break the threshold
            # and some addition would keep it
            kept = [c for c in candidates if self._balance_after(users, items, c[0]) >= self.threshold]
            if kept:
                candidates = kept
            side, node, (b, e) = candidates[int(rng.integers(len(candidates)))]
            (users if side is Side.USER else items).append(node)
        if min(len(users), len(items)) / max(len(users), len(items)) < self.threshold:
            return None
        return (b, e, tuple(sorted(users)), tuple(sorted(items)))

    def run(self, seed: int, trials: Sequence[int]) -> set:
        found = set()
        for trial in trials:
            result = self.trial(seed, trial)
            if result is not None:
                found.add(result)
        return found


def sample_balanced_max_cliques(stream: LinkStream, n_samples: int, balance_threshold: float, seed: int,
                                stop_probability: float = 0.5, workers: int = 1) -> List[Clique]:
    """
    Samples maximal cliques whose balancedness reaches the threshold.

    Args:
        stream: the link stream
        n_samples: number of randomized trials
        balance_threshold: minimum min/max ratio of the two sides, in [0, 1]
        seed: base seed; trial t draws from the sub-seed (seed, t)
        stop_probability: chance of stopping at a maximal, balanced clique instead of growing it
        workers: threads sharing the trials

    Returns:
        distinct cliques sorted by (begin, end, users, items); may hold fewer than n_samples
    """
    if n_samples <= 0:
        raise ConfigurationError(f"n_samples must be positive, got {n_samples}")
    if not 0 <= balance_threshold <= 1:
        raise ConfigurationError(f"balance threshold must lie in [0, 1], got {balance_threshold}")
    if not 0 <= stop_probability <= 1:
        raise ConfigurationError(f"stop probability must lie in [0, 1], got {stop_probability}")
    if stream.n_links == 0:
        return []
    sampler = _Sampler(stream, balance_threshold, stop_probability)
    # build both indexes before any worker touches them
    for side in Side:
        stream.index(side)
    trials = np.arange(n_samples)
    if workers > 1:
        chunks = np.array_split(trials, workers * 4)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda chunk: sampler.run(seed, chunk.tolist()), chunks))
        found = set().union(*parts)
    else:
        found = sampler.run(seed, trials.tolist())
    users, items = stream.user_labels, stream.item_labels
    cliques = [
        Clique(frozenset(users[list(u)].tolist()), frozenset(items[list(i)].tolist()), Interval(b, e))
        for b, e, u, i in found
    ]
    cliques.sort(key=lambda c: c.key)
    LOGGER.info(f"sampled {len(cliques)} distinct cliques from {n_samples} trials "
                f"(balance >= {balance_threshold})")
    return cliques


def enumerate_maximal_cliques(stream: LinkStream, max_nodes: int = 12) -> List[Clique]:
    """Every maximal clique of a small stream, by brute force over node subsets."""
    users, items = sorted(stream.users), sorted(stream.items)
    if len(users) + len(items) > max_nodes:
        raise DomainError(f"brute force is limited to {max_nodes} nodes, stream has {len(users) + len(items)}")
    intervals = {}
    for row in stream.links.itertuples(index=False):
        intervals.setdefault((row.user, row.item), []).append((row.begin, row.end))
    found = []
    for nu in range(1, len(users) + 1):
        for us in itertools.combinations(users, nu):
            for ni in range(1, len(items) + 1):
                for its in itertools.combinations(items, ni):
                    pieces = [(stream.span.begin, stream.span.end)]
                    for pair in itertools.product(us, its):
                        pieces = _intersect(pieces, sorted(intervals.get(pair, [])))
                        if not pieces:
                            break
                    for b, e in pieces:
                        clique = Clique(frozenset(us), frozenset(its), Interval(b, e))
                        if is_maximal(stream, clique):
                            found.append(clique)
    found.sort(key=lambda c: c.key)
    return found


def clique_node_features(cliques: Sequence[Clique], node, span_length: float,
                         side: Optional[Side] = None) -> CliqueFeatureSet:
    """Mean balancedness, mean normalised duration and fraction of the cliques holding node."""
    if span_length <= 0:
        raise DomainError(f"span length must be positive, got {span_length}")
    if not cliques:
        return CliqueFeatureSet()
    holding = [c for c in cliques if c.contains(node, side)]
    if not holding:
        return CliqueFeatureSet()
    return CliqueFeatureSet(
        float(np.mean([c.balancedness for c in holding])),
        float(np.mean([c.interval.length / span_length for c in holding])),
        len(holding) / len(cliques),
    )


def clique_feature_table(cliques: Sequence[Clique], side: Side, span_length: float) -> pd.DataFrame:
    """clique_node_features of every node of one side that sits in at least one clique."""
    if span_length <= 0:
        raise DomainError(f"span length must be positive, got {span_length}")
    side = Side(side)
    rows = []
    for clique in cliques:
        members = clique.user_set if side is Side.USER else clique.item_set
        for node in members:
            rows.append((node, clique.balancedness, clique.interval.length / span_length))
    if not rows:
        return pd.DataFrame(columns=CLIQUE_COLUMNS, dtype=float)
    frame = pd.DataFrame(rows, columns=["node", "balance", "duration"])
    grouped = frame.groupby("node")
    table = pd.DataFrame({
        "clq_balance": grouped["balance"].mean(),
        "clq_duration": grouped["duration"].mean(),
        "clq_fraction": grouped.size() / len(cliques),
    })
    table.index.name = None
    return table


def format_cliques(cliques: Iterable[Clique]) -> str:
    return "".join(f"{clique}\n" for clique in cliques)


def parse_cliques(text: str, id_type=int) -> List[Clique]:
    cliques = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 3 or len(parts[0].split()) != 2:
            raise ValidationError(f"clique line {number}: expected 'b e | users | items', got {line!r}")
        b, e = (float(x) for x in parts[0].split())
        b, e = (int(x) if x.is_integer() else x for x in (b, e))
        users = frozenset(id_type(u) for u in parts[1].split(","))
        items = frozenset(id_type(i) for i in parts[2].split(","))
        cliques.append(Clique(users, items, Interval(b, e)))
    return cliques


def write_cliques(cliques: Iterable[Clique], path: str) -> None:
    with io.open(path, "w", encoding="utf-8") as f:
        f.write(format_cliques(cliques))


def read_cliques(path: str, id_type=int) -> List[Clique]:
    with io.open(path, encoding="utf-8") as f:
        return parse_cliques(f.read(), id_type)
