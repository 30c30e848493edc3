import logging
import os
from os import environ

import requests
from dotenv import load_dotenv

from functions.errors import ConfigurationError

if os.path.exists('config.env'):
    load_dotenv('config.env')

LOG_FILE = environ.get("LOG_FILE", "log.txt")

logging.basicConfig(
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[logging.FileHandler(LOG_FILE),
              logging.StreamHandler()],
    level=logging.INFO
)

LOGGER = logging.getLogger(__name__)


def is_enabled(value: str):
    return bool(str(value).lower() in ["true", "1", "e", "d"])


def get_config_from_url():
    CONFIG_FILE_URL = os.environ.get('CONFIG_FILE_URL', None)
    if not CONFIG_FILE_URL:
        return
    try:
        res = requests.get(CONFIG_FILE_URL, timeout=30)
        if res.status_code == 200:
            LOGGER.info("config.env fetched from CONFIG_FILE_URL. Status 200.")
            with open('config.env', 'wb+') as f:
                f.write(res.content)
        else:
            LOGGER.error(f"Failed to download config.env {res.status_code}")
    except Exception as e:
        LOGGER.error(f"CONFIG_FILE_URL: {e}")


def _number(name: str, default, cast):
    value = environ.get(name, default)
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name}={value!r} is not a valid {cast.__name__}") from None


get_config_from_url()
if os.path.exists('config.env'):
    load_dotenv('config.env')

# MovieLens 20M directory holding ratings.csv, movies.csv and tags.csv
DATA_DIR = environ.get("STREAMREC_DATA_DIR", "./ml-20m")
OUT_DIR = environ.get("STREAMREC_OUT_DIR", "./out")
ML20M_URL = environ.get("ML20M_URL", "https://files.grouplens.org/datasets/movielens/ml-20m.zip")

# cross-validation
FOLDS = _number("STREAMREC_FOLDS", 5, int)
SEED = _number("STREAMREC_SEED", 0, int)

# presence duration of one event, seconds
DELTA = _number("STREAMREC_DELTA", 86400, int)
INCLUDE_TAGS = is_enabled(environ.get("STREAMREC_INCLUDE_TAGS", "True"))

# clique sampler
SAMPLES = _number("STREAMREC_SAMPLES", 10000, int)
BALANCE = _number("STREAMREC_BALANCE", 0.5, float)
STOP_PROBABILITY = _number("STREAMREC_STOP_PROBABILITY", 0.5, float)

# baseline and scoring
REGULARIZATION = _number("STREAMREC_REGULARIZATION", 10.0, float)
EPOCHS = _number("STREAMREC_EPOCHS", 10, int)
NDCG_K = _number("STREAMREC_NDCG_K", 10, int)

# caps fold and sampling parallelism
THREADS = _number("STREAMREC_THREADS", os.cpu_count() or 1, int)
