#!/usr/bin/env python3
"""Train and freeze the shipped default gesture model.

The packaged model lets the CLI and the streaming tests run without a
training pass; the acceptance suite still trains from scratch.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from omg import gestures, lstm

OUT = Path(__file__).resolve().parents[1] / "src" / "omg" / "data" / "models" / "default_lstm.json"

DATASET_SEED = 7
TRAIN_SEED = 0


def main() -> None:
    data = gestures.generate_dataset(seed=DATASET_SEED, per_class_count=200)
    result = lstm.train(data, lstm.TrainConfig(seed=TRAIN_SEED))
    print(f"holdout accuracy: {result.holdout_accuracy:.4f}")
    if result.holdout_accuracy < 0.95:
        raise SystemExit("refusing to ship a model below the 95% bar")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    lstm.save_model(result.model, OUT)
    print(f"model -> {OUT}")


if __name__ == "__main__":
    main()
