from __future__ import annotations

from pathlib import Path

import pytest

from omg import lstm

GOLDEN_DIR = Path(__file__).parent / "golden"

# the default training setup: dataset seed 7, train seed 0 (matches the
# shipped model in omg/data/models)
DATASET_SEED = 7
TRAIN_SEED = 0


@pytest.fixture(scope="session")
def shipped_model():
    from importlib import resources

    path = resources.files("omg.data").joinpath("models/default_lstm.json")
    with resources.as_file(path) as p:
        return lstm.load_model(p)


@pytest.fixture(scope="session")
def default_dataset():
    from omg import gestures

    return gestures.generate_dataset(seed=DATASET_SEED, per_class_count=200)


@pytest.fixture(scope="session")
def default_features(default_dataset):
    return lstm.featurize_samples(default_dataset)
