import io
import json
import logging
import os
from typing import Dict, Iterable

import pandas as pd

from functions.cliques import Clique, write_cliques
from functions.errors import MalformedRowError
from functions.linkstream import Interval, LinkStream, format_stream, parse_stream
from functions.metrics import PREDICTION_COLUMNS, PredictionSet

LOGGER = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6g"


class MatrixStore:
    """
    Output directory of one run.

    Layout: schema.json, report.json, report.txt at the root and one fold<k>/ directory per fold
    with train.csv, test.csv, predictions.csv and cliques.txt.
    """

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)

    def fold_dir(self, fold: int) -> str:
        path = os.path.join(self.root, f"fold{fold}")
        os.makedirs(path, exist_ok=True)
        return path

    def write_csv(self, frame: pd.DataFrame, path: str) -> str:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
        LOGGER.info(f"wrote {path} ({len(frame)} rows, {frame.shape[1]} columns)")
        return path

    def write_matrix(self, fold: int, name: str, frame: pd.DataFrame) -> str:
        return self.write_csv(frame, os.path.join(self.fold_dir(fold), f"{name}.csv"))

    def write_predictions(self, fold: int, predictions: PredictionSet) -> str:
        return self.write_csv(predictions.frame, os.path.join(self.fold_dir(fold), "predictions.csv"))

    def write_cliques(self, fold: int, cliques: Iterable[Clique]) -> str:
        path = os.path.join(self.fold_dir(fold), "cliques.txt")
        write_cliques(cliques, path)
        return path

    def write_json(self, name: str, payload: Dict) -> str:
        path = os.path.join(self.root, name)
        with io.open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
        return path

    def write_text(self, name: str, text: str) -> str:
        path = os.path.join(self.root, name)
        with io.open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path


def write_stream(stream: LinkStream, path: str) -> str:
    with io.open(path, "w", encoding="utf-8") as f:
        f.write(format_stream(stream))
    return path


def read_stream(path: str, span: Interval, delta: float = 1, id_type=int) -> LinkStream:
    with io.open(path, encoding="utf-8") as f:
        return parse_stream(f.read(), span, delta, id_type)


def read_predictions(path: str) -> PredictionSet:
    """Reads a user,item,predicted,truth CSV such as an external booster's output."""
    try:
        frame = pd.read_csv(path, encoding="utf-8")
    except pd.errors.ParserError as e:
        raise MalformedRowError(path, 0, str(e)) from e
    except pd.errors.EmptyDataError:
        raise MalformedRowError(path, 1, f"missing header {','.join(PREDICTION_COLUMNS)}")
    missing = set(PREDICTION_COLUMNS) - set(frame.columns)
    if missing:
        raise MalformedRowError(path, 1, f"missing columns {sorted(missing)}")
    for column in ("predicted", "truth"):
        values = pd.to_numeric(frame[column], errors="coerce")
        if values.isna().any():
            row = int(values.isna().to_numpy().nonzero()[0][0])
            raise MalformedRowError(path, row + 2, f"{column} {frame[column].iloc[row]!r} is not a number")
        frame[column] = values
    return PredictionSet(frame)
