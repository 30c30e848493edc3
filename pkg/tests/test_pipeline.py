import json
import os

import numpy as np
import pandas as pd
import pytest

from database.store import read_predictions
from functions.content import movie_metadata_table
from functions.errors import PipelineError
from functions.ingest import Dataset, FoldAssignment, kfold_split, load_dataset
from functions.metrics import PREDICTION_COLUMNS
from functions.pipeline import (ExperimentConfig, assemble_feature_matrix, fold_matrices, matrix_columns,
                                run_experiment, schema)


def small_config(data_dir, out_dir, **kwargs):
    settings = dict(folds=3, seed=1, samples=200, threads=1)
    settings.update(kwargs)
    return ExperimentConfig(data_dir, str(out_dir), **settings)


@pytest.mark.parametrize("options,width", [
    ({}, 70),
    ({"strict_39": True}, 64),
    ({"keep_discarded": True}, 74),
    ({"content_only": True}, 49),
])
def test_matrix_widths(tmp_path, options, width):
    assert len(matrix_columns(small_config("data", tmp_path, **options))) == width


def test_schema_lists_features_only(tmp_path):
    described = schema(small_config("data", tmp_path))
    assert described["identifiers"] == ["user", "item", "timestamp"]
    assert described["target"] == "rating"
    assert len(described["features"]) == 66
    assert not {"user", "item", "timestamp", "rating"} & set(described["features"])
    assert "data_dir" not in described["options"] and "threads" not in described["options"]


def test_run_experiment_writes_every_output(movielens_dir, tmp_path):
    out = tmp_path / "out"
    report = run_experiment(small_config(movielens_dir, out))
    assert [fold.fold for fold in report.folds] == [0, 1, 2]
    assert sum(fold.n_test for fold in report.folds) == 1000
    for name in ("schema.json", "report.json", "report.txt"):
        assert os.path.exists(out / name)
    for fold in range(3):
        train = pd.read_csv(out / f"fold{fold}" / "train.csv")
        test = pd.read_csv(out / f"fold{fold}" / "test.csv")
        assert list(train.columns) == list(test.columns)
        assert train.shape[1] == 70
        assert not train.isna().any().any() and not test.isna().any().any()
        assert len(train) + len(test) == 1000
        predictions = read_predictions(str(out / f"fold{fold}" / "predictions.csv"))
        assert list(predictions.frame.columns) == PREDICTION_COLUMNS
        assert len(predictions) == len(test)
        assert os.path.exists(out / f"fold{fold}" / "cliques.txt")
    written = json.loads((out / "report.json").read_text())
    assert written["aggregate"]["rmse"]["mean"] == pytest.approx(report.mean("rmse"))
    assert "NDCG" in (out / "report.txt").read_text()


def test_baseline_beats_the_global_mean(movielens_dir, tmp_path):
    report = run_experiment(small_config(movielens_dir, tmp_path / "out", content_only=True))
    for fold in report.folds:
        assert fold.mae <= fold.rmse
        assert 0.0 <= fold.ndcg <= 1.0
        assert fold.beats_global_mean


def test_runs_are_reproducible(movielens_dir, tmp_path):
    run_experiment(small_config(movielens_dir, tmp_path / "a"))
    run_experiment(small_config(movielens_dir, tmp_path / "b"))
    run_experiment(small_config(movielens_dir, tmp_path / "c", threads=4))
    for name in ("report.json", "fold0/train.csv", "fold2/test.csv", "fold1/cliques.txt"):
        first = (tmp_path / "a" / name).read_bytes()
        assert first == (tmp_path / "b" / name).read_bytes()
        assert first == (tmp_path / "c" / name).read_bytes()


def test_whole_stream_cliques_are_shared_by_folds(movielens_dir, tmp_path):
    out = tmp_path / "out"
    run_experiment(small_config(movielens_dir, out, whole_stream_cliques=True))
    texts = {(out / f"fold{fold}" / "cliques.txt").read_text() for fold in range(3)}
    assert len(texts) == 1


def fold_zero(dataset, assignment, config):
    metadata = movie_metadata_table(dataset.movies)
    return fold_matrices(dataset, assignment, 0, metadata, config)


def test_test_ratings_do_not_reach_the_features(movielens_dir, tmp_path):
    dataset = load_dataset(movielens_dir)
    assignment = kfold_split(dataset.ratings, 3, seed=1)
    config = small_config(movielens_dir, tmp_path)
    train_a, test_a, _ = fold_zero(dataset, assignment, config)

    ratings = dataset.ratings.copy()
    held_out = assignment.test_mask(0)
    ratings.loc[held_out, "rating"] = 5.5 - ratings.loc[held_out, "rating"]
    train_b, test_b, _ = fold_zero(Dataset(ratings, dataset.movies, dataset.tags), assignment, config)

    pd.testing.assert_frame_equal(train_a, train_b)
    pd.testing.assert_frame_equal(test_a.drop(columns="rating"), test_b.drop(columns="rating"))
    assert test_b["rating"].tolist() == ratings.loc[held_out, "rating"].tolist()


def test_removing_a_test_rating_changes_only_its_row(movielens_dir, tmp_path):
    dataset = load_dataset(movielens_dir)
    assignment = kfold_split(dataset.ratings, 3, seed=1)
    config = small_config(movielens_dir, tmp_path)
    train_a, test_a, _ = fold_zero(dataset, assignment, config)

    position = int(np.flatnonzero(assignment.test_mask(0))[0])
    ratings = dataset.ratings.drop(index=dataset.ratings.index[position]).reset_index(drop=True)
    smaller = FoldAssignment(3, np.delete(assignment.assignment, position), assignment.seed)
    train_b, test_b, _ = fold_zero(Dataset(ratings, dataset.movies, dataset.tags), smaller, config)

    pd.testing.assert_frame_equal(train_a, train_b)
    pd.testing.assert_frame_equal(test_a.iloc[1:].reset_index(drop=True), test_b)


def test_empty_test_fold(movielens_dir, tmp_path):
    dataset = load_dataset(movielens_dir)
    assignment = FoldAssignment(3, np.arange(len(dataset.ratings)) % 2)
    metadata = movie_metadata_table(dataset.movies)
    with pytest.raises(PipelineError) as e:
        fold_matrices(dataset, assignment, 2, metadata, small_config(movielens_dir, tmp_path))
    assert e.value.stage == "split"
    assert e.value.fold == 2


def test_assembly_without_features(movielens_dir, tmp_path):
    dataset = load_dataset(movielens_dir)
    with pytest.raises(PipelineError):
        assemble_feature_matrix(dataset.ratings, movie_metadata_table(dataset.movies), None,
                                small_config(movielens_dir, tmp_path))


def test_zero_delta_fails_in_the_stream_stage(movielens_dir, tmp_path):
    with pytest.raises(PipelineError) as e:
        run_experiment(small_config(movielens_dir, tmp_path / "out", delta=0))
    assert e.value.stage == "stream"
