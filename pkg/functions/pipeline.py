import asyncio
import logging
import time
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import psutil

from database.store import MatrixStore
from functions.baseline import fit_baseline, global_mean_predictions
from functions.cliques import CLIQUE_COLUMNS, Clique, clique_feature_table, sample_balanced_max_cliques
from functions.content import content_columns, entity_stats_table, missing_content_row, movie_metadata_table
from functions.errors import PipelineError, stage
from functions.ingest import Dataset, FoldAssignment, kfold_split, load_dataset
from functions.linkstream import LinkStream, Side, build_stream, data_span, induced_graph
from functions.metrics import FoldMetrics, MetricsReport, PredictionSet, rmse, score
from functions.progress import ReadableTime, humanbytes
from functions.stream_features import (DEGREE_COLUMNS, DISCARDED_COLUMNS, ICT_COLUMNS, node_feature_table,
                                       pair_assortativity)
from translation import Translation

LOGGER = logging.getLogger(__name__)

ID_COLUMNS = ["user", "item", "timestamp"]
TARGET = "rating"
PREFIXES = {Side.USER: "u_", Side.ITEM: "m_"}


@dataclass(frozen=True)
class ExperimentConfig:
    data_dir: str
    out_dir: str
    folds: int = 5
    seed: int = 0
    delta: int = 86400
    samples: int = 10000
    balance: float = 0.5
    stop_probability: float = 0.5
    strict_39: bool = False
    keep_discarded: bool = False
    content_only: bool = False
    whole_stream_cliques: bool = False
    include_tags: bool = True
    regularization: float = 10.0
    epochs: int = 10
    ndcg_k: int = 10
    threads: int = 1

    def options(self) -> Dict:
        """Settings that shape the outputs; paths and thread count excluded."""
        options = asdict(self)
        for key in ("data_dir", "out_dir", "threads"):
            options.pop(key)
        return options


@dataclass(eq=False)
class FoldFeatures:
    """Everything a fold's matrices are built from; computed on training data only."""
    fold: int
    global_mean: float
    user_stats: pd.DataFrame
    movie_stats: pd.DataFrame
    span_length: float = 0.0
    stream: Optional[LinkStream] = None
    cliques: Optional[List[Clique]] = None
    user_table: Optional[pd.DataFrame] = None
    item_table: Optional[pd.DataFrame] = None


def node_columns(keep_discarded: bool = False) -> List[str]:
    return DEGREE_COLUMNS + (DISCARDED_COLUMNS if keep_discarded else []) + ICT_COLUMNS + CLIQUE_COLUMNS


def stream_columns(keep_discarded: bool = False) -> List[str]:
    columns = node_columns(keep_discarded)
    return ([PREFIXES[Side.USER] + c for c in columns] + [PREFIXES[Side.ITEM] + c for c in columns]
            + ["edge_assort"])


def feature_columns(config: ExperimentConfig) -> List[str]:
    columns = content_columns(config.strict_39)
    if not config.content_only:
        columns += stream_columns(config.keep_discarded)
    return columns


def matrix_columns(config: ExperimentConfig) -> List[str]:
    return ID_COLUMNS + feature_columns(config) + [TARGET]


def schema(config: ExperimentConfig) -> Dict:
    return {
        "identifiers": ID_COLUMNS,
        "features": feature_columns(config),
        "target": TARGET,
        "options": config.options(),
    }


def split_fold(dataset: Dataset, assignment: FoldAssignment, fold: int,
               include_tags: bool = True) -> Tuple[pd.DataFrame, pd.DataFrame, pd.DataFrame]:
    """Training ratings, test ratings and training events (training ratings plus tags)."""
    train = dataset.ratings[assignment.train_mask(fold)]
    test = dataset.ratings[assignment.test_mask(fold)]
    events = train
    if include_tags and dataset.tags is not None and not dataset.tags.empty:
        events = pd.concat([train, dataset.tags], ignore_index=True)
    return train, test, events[["time", "user", "item"]]


def stream_node_tables(stream: LinkStream, cliques: List[Clique], clique_span: float,
                       keep_discarded: bool) -> Dict[Side, pd.DataFrame]:
    graph = induced_graph(stream)
    tables = {}
    for side in Side:
        table = node_feature_table(stream, graph, side, keep_discarded)
        clq = clique_feature_table(cliques, side, clique_span)
        table = table.join(clq.reindex(table.index)).fillna({c: 0.0 for c in CLIQUE_COLUMNS})
        tables[side] = table[node_columns(keep_discarded)]
    return tables


def compute_fold_features(fold: int, train: pd.DataFrame, events: pd.DataFrame, config: ExperimentConfig,
                          whole_cliques: Optional[Tuple[List[Clique], float]] = None,
                          workers: int = 1) -> FoldFeatures:
    """
    Content and stream features of one fold from its training side.

    Args:
        fold: fold id, used in stage-tagged errors
        train: training ratings
        events: training events (ratings and, optionally, tags) feeding the link stream
        config: experiment settings
        whole_cliques: cliques sampled on the whole stream and that stream's span length, used
            instead of per-fold sampling
        workers: threads for the clique sampler

    Returns:
        FoldFeatures
    """
    with stage("content", fold):
        global_mean = float(train["rating"].mean())
        features = FoldFeatures(
            fold, global_mean,
            user_stats=entity_stats_table(train, Side.USER, "user"),
            movie_stats=entity_stats_table(train, Side.ITEM, "movie"),
        )
    if config.content_only:
        return features
    with stage("stream", fold):
        span = data_span(events, config.delta)
        stream = build_stream(events, config.delta, span)
        features.stream, features.span_length = stream, span.length
    with stage("cliques", fold):
        if whole_cliques is not None:
            cliques, clique_span = whole_cliques
        else:
            cliques = sample_balanced_max_cliques(stream, config.samples, config.balance, config.seed,
                                                  config.stop_probability, workers)
            clique_span = span.length
        features.cliques = cliques
    with stage("stream-features", fold):
        tables = stream_node_tables(stream, cliques, clique_span, config.keep_discarded)
        features.user_table, features.item_table = tables[Side.USER], tables[Side.ITEM]
    return features


def _lookup(table: pd.DataFrame, keys: pd.Series, fill: Dict) -> pd.DataFrame:
    block = table.reindex(keys.to_numpy()).fillna(fill)
    block.index = keys.index
    return block


def _node_fill(keep_discarded: bool, span_length: float) -> Dict:
    fill = {c: 0.0 for c in node_columns(keep_discarded)}
    fill.update({c: span_length for c in ICT_COLUMNS})
    return fill


def assemble_feature_matrix(rows: pd.DataFrame, metadata: pd.DataFrame, features: Optional[FoldFeatures],
                            config: ExperimentConfig) -> pd.DataFrame:
    """
    Feature matrix of rating rows: identifiers, content block, stream block, target.

    Every feature value comes from `features`, so rows of the test fold only contribute their
    identifiers and target.
    """
    if features is None:
        raise PipelineError("assemble", "content features were not computed")
    if not config.content_only and (features.user_table is None or features.item_table is None):
        raise PipelineError("assemble", "stream features were not computed", features.fold)
    missing = missing_content_row(features.global_mean).to_dict()
    blocks = [
        pd.DataFrame({"user": rows["user"], "item": rows["item"], "timestamp": rows["time"]}),
        _lookup(metadata, rows["item"], missing).astype(np.int8),
        _lookup(features.movie_stats, rows["item"], missing),
    ]
    if not config.strict_39:
        blocks.append(_lookup(features.user_stats, rows["user"], missing))
    if not config.content_only:
        fill = _node_fill(config.keep_discarded, features.span_length)
        user = _lookup(features.user_table, rows["user"], fill).add_prefix(PREFIXES[Side.USER])
        item = _lookup(features.item_table, rows["item"], fill).add_prefix(PREFIXES[Side.ITEM])
        assort = pair_assortativity(user["u_dG"].to_numpy(), item["m_dG"].to_numpy())
        blocks += [user, item, pd.DataFrame({"edge_assort": assort}, index=rows.index)]
    blocks.append(rows[["rating"]].astype(float))
    matrix = pd.concat(blocks, axis=1).reset_index(drop=True)
    return matrix[matrix_columns(config)]


def fold_matrices(dataset: Dataset, assignment: FoldAssignment, fold: int, metadata: pd.DataFrame,
                  config: ExperimentConfig, whole_cliques=None,
                  workers: int = 1) -> Tuple[pd.DataFrame, pd.DataFrame, FoldFeatures]:
    train, test, events = split_fold(dataset, assignment, fold, config.include_tags)
    if test.empty:
        raise PipelineError("split", "fold has no test ratings", fold)
    features = compute_fold_features(fold, train, events, config, whole_cliques, workers)
    with stage("assemble", fold):
        return (assemble_feature_matrix(train, metadata, features, config),
                assemble_feature_matrix(test, metadata, features, config), features)


def _predictions(matrix: pd.DataFrame, predicted: np.ndarray) -> PredictionSet:
    return PredictionSet.from_arrays(matrix["user"], matrix["item"], predicted, matrix[TARGET])


def run_fold(dataset: Dataset, assignment: FoldAssignment, fold: int, metadata: pd.DataFrame,
             config: ExperimentConfig, store: MatrixStore, whole_cliques=None, workers: int = 1) -> FoldMetrics:
    start = time.time()
    LOGGER.info(f"fold {fold}: started")
    train, test, features = fold_matrices(dataset, assignment, fold, metadata, config, whole_cliques, workers)
    with stage("export", fold):
        store.write_matrix(fold, "train", train)
        store.write_matrix(fold, "test", test)
        if features.cliques is not None:
            store.write_cliques(fold, features.cliques)
    with stage("baseline", fold):
        model = fit_baseline(train, config.regularization, config.epochs)
        on_test = _predictions(test, model.predict_frame(test))
        on_train = _predictions(train, model.predict_frame(train))
        oracle = _predictions(test, global_mean_predictions(train, test))
    with stage("score", fold):
        store.write_predictions(fold, on_test)
        test_scores = score(on_test, config.ndcg_k)
        train_scores = score(on_train, config.ndcg_k)
        metrics = FoldMetrics(
            fold, len(train), len(test),
            test_scores["mae"], test_scores["rmse"], test_scores["ndcg"],
            train_scores["mae"], train_scores["rmse"], train_scores["ndcg"],
            rmse(oracle),
        )
    LOGGER.info(f"fold {fold}: rmse {metrics.rmse:.4f} (global mean {metrics.global_mean_rmse:.4f}) "
                f"in {ReadableTime(time.time() - start)}")
    return metrics


def render_report(report: MetricsReport) -> str:
    lines = [Translation.REPORT_HEADER.format(k=report.k, options=report.options)]
    for fold in report.folds:
        lines.append(Translation.REPORT_FOLD.format(**asdict(fold)))
    lines.append("")
    for name, values in report.aggregate().items():
        lines.append(Translation.REPORT_AGGREGATE.format(name=name, **values))
    return "\n".join(lines) + "\n"


def log_resources():
    process = psutil.Process()
    LOGGER.info(Translation.RESOURCE_TEXT.format(rss=humanbytes(process.memory_info().rss),
                                                 cpu=psutil.cpu_percent()))


async def _run_folds(dataset, assignment, metadata, config, store, whole_cliques) -> List[FoldMetrics]:
    limit = max(1, min(config.threads, config.folds))
    workers = max(1, config.threads // limit)
    semaphore = asyncio.Semaphore(limit)

    async def one(fold: int) -> FoldMetrics:
        async with semaphore:
            return await asyncio.to_thread(run_fold, dataset, assignment, fold, metadata, config, store,
                                           whole_cliques, workers)

    return list(await asyncio.gather(*(one(fold) for fold in range(config.folds))))


def run_experiment(config: ExperimentConfig, dataset: Optional[Dataset] = None) -> MetricsReport:
    """
    Cross-validated run: per fold, training stream, features, matrices, baseline and scores.

    Writes the matrices, predictions, cliques, schema.json, report.json and report.txt under
    config.out_dir; folds run concurrently up to config.threads.
    """
    start = time.time()
    store = MatrixStore(config.out_dir)
    if dataset is None:
        with stage("ingest"):
            dataset = load_dataset(config.data_dir, config.include_tags)
    with stage("split"):
        assignment = kfold_split(dataset.ratings, config.folds, config.seed)
    with stage("metadata"):
        metadata = movie_metadata_table(dataset.movies)
    whole_cliques = None
    if config.whole_stream_cliques and not config.content_only:
        LOGGER.warning("sampling cliques on the whole stream: clique features see test ratings")
        with stage("cliques"):
            events = dataset.events if config.include_tags else dataset.ratings
            span = data_span(events, config.delta)
            stream = build_stream(events, config.delta, span)
            cliques = sample_balanced_max_cliques(stream, config.samples, config.balance, config.seed,
                                                  config.stop_probability, config.threads)
            whole_cliques = (cliques, span.length)
    store.write_json("schema.json", schema(config))
    metrics = asyncio.run(_run_folds(dataset, assignment, metadata, config, store, whole_cliques))
    report = MetricsReport(config.ndcg_k, sorted(metrics, key=lambda m: m.fold), config.options())
    for fold in report.folds:
        if not fold.beats_global_mean:
            LOGGER.warning(Translation.BASELINE_LOSES.format(fold=fold.fold, rmse=fold.rmse,
                                                             oracle=fold.global_mean_rmse))
    store.write_json("report.json", report.as_dict())
    store.write_text("report.txt", render_report(report))
    log_resources()
    LOGGER.info(f"experiment finished in {ReadableTime(time.time() - start)}")
    return report
