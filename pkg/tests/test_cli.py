import pandas as pd
import pytest

from database.store import read_stream
from functions.cliques import read_cliques
from functions.linkstream import format_stream
from plugins.stream import dataset_stream
from streamrec import StreamRec


@pytest.fixture(scope="module")
def app():
    return StreamRec()


def test_ingest_report(app, movielens_dir, capsys):
    assert app.run(["ingest", "--data-dir", movielens_dir, "--report"]) == 0
    out = capsys.readouterr().out
    assert "Ratings: 1000" in out
    assert "Tag events: 60" in out


def test_ingest_without_tags(app, movielens_dir, capsys):
    assert app.run(["ingest", "--data-dir", movielens_dir, "--report", "--exclude-tags"]) == 0
    assert "Tag events: 0" in capsys.readouterr().out


def test_missing_data_dir_exits_with_one(app, tmp_path):
    assert app.run(["ingest", "--data-dir", str(tmp_path / "missing")]) == 1


def test_evaluate(app, tmp_path, capsys):
    path = tmp_path / "predictions.csv"
    pd.DataFrame({"user": [1, 1], "item": [1, 2], "predicted": [3.0, 4.0], "truth": [4.0, 2.0]}).to_csv(
        path, index=False)
    assert app.run(["evaluate", "--predictions", str(path), "--k", "2"]) == 0
    out = capsys.readouterr().out
    assert "MAE: 1.500000" in out
    assert "RMSE: 1.581139" in out


def test_evaluate_rejects_bad_file(app, tmp_path):
    path = tmp_path / "predictions.csv"
    path.write_text("user,item,predicted\n1,1,3.0\n")
    assert app.run(["evaluate", "--predictions", str(path)]) == 1


def test_run_all(app, movielens_dir, tmp_path, capsys):
    out = tmp_path / "out"
    code = app.run(["run-all", "--data-dir", movielens_dir, "--out", str(out), "--folds", "2",
                    "--samples", "100", "--threads", "1", "--strict-39"])
    assert code == 0
    assert "fold 1:" in capsys.readouterr().out
    assert pd.read_csv(out / "fold0" / "train.csv").shape[1] == 64


def test_run_all_with_zero_delta_exits_with_two(app, movielens_dir, tmp_path):
    code = app.run(["run-all", "--data-dir", movielens_dir, "--out", str(tmp_path / "out"), "--folds", "2",
                    "--delta", "0", "--threads", "1"])
    assert code == 2


def test_stream_dump(app, movielens_dir, tmp_path, capsys):
    path = tmp_path / "stream.txt"
    assert app.run(["stream", "--data-dir", movielens_dir, "--out", str(path), "--delta", "86400"]) == 0
    assert "links" in capsys.readouterr().out
    expected = dataset_stream(movielens_dir, 86400, True)
    assert path.read_text() == format_stream(expected)
    again = read_stream(str(path), expected.span, 86400)
    assert format_stream(again) == format_stream(expected)


def test_cliques_dump(app, movielens_dir, tmp_path):
    path = tmp_path / "cliques.txt"
    assert app.run(["cliques", "--data-dir", movielens_dir, "--out", str(path), "--samples", "100",
                    "--threads", "1"]) == 0
    cliques = read_cliques(str(path))
    assert cliques
    assert all(c.balancedness >= 0.5 for c in cliques)


def test_status(app, capsys):
    assert app.run(["status"]) == 0
    assert "CPU:" in capsys.readouterr().out
