"""Single-layer LSTM sequence classifier, trained from scratch.

Standard gate equations over 11-dim motion features, readout over the
final hidden state, softmax cross-entropy loss, full backpropagation
through time, plain SGD with momentum. Everything is float64 numpy and
deterministic given the seed.

Weight file format (version 1): one JSON document
    {"version": 1, "input_dim": F, "hidden": H, "weights": {name: flat row-major}}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .gestures import FEATURE_DIM, GestureClass, GestureSample, featurize

N_CLASSES = len(GestureClass)
GATE_NAMES = ("i", "f", "o", "g")
WEIGHT_NAMES = tuple(
    [f"W_{g}" for g in GATE_NAMES]
    + [f"U_{g}" for g in GATE_NAMES]
    + [f"b_{g}" for g in GATE_NAMES]
    + ["R", "r"]
)


class ShapeError(ValueError):
    pass


class TrainingDivergedError(RuntimeError):
    pass


@dataclass
class LstmModel:
    input_dim: int
    hidden: int
    weights: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        F, H = self.input_dim, self.hidden
        expected = {f"W_{g}": (H, F) for g in GATE_NAMES}
        expected.update({f"U_{g}": (H, H) for g in GATE_NAMES})
        expected.update({f"b_{g}": (H,) for g in GATE_NAMES})
        expected["R"] = (N_CLASSES, H)
        expected["r"] = (N_CLASSES,)
        for name, shape in expected.items():
            w = self.weights.get(name)
            if w is None or w.shape != shape:
                raise ShapeError(f"weight {name}: expected shape {shape}, got "
                                 f"{None if w is None else w.shape}")
            if not np.all(np.isfinite(w)):
                raise ValueError(f"weight {name} contains non-finite entries")

    def packed(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Gate weights stacked (i, f, o, g) for batched evaluation."""
        W = np.vstack([self.weights[f"W_{g}"] for g in GATE_NAMES])
        U = np.vstack([self.weights[f"U_{g}"] for g in GATE_NAMES])
        b = np.concatenate([self.weights[f"b_{g}"] for g in GATE_NAMES])
        return W, U, b


def init_model(seed: int, input_dim: int = FEATURE_DIM, hidden: int = 32) -> LstmModel:
    """Xavier-uniform gates, forget bias 1.0 (keeps early memory open)."""
    rng = np.random.default_rng(seed)
    weights: dict[str, np.ndarray] = {}

    def xavier(rows, cols):
        a = math.sqrt(6.0 / (rows + cols))
        return rng.uniform(-a, a, size=(rows, cols))

    for g in GATE_NAMES:
        weights[f"W_{g}"] = xavier(hidden, input_dim)
        weights[f"U_{g}"] = xavier(hidden, hidden)
        weights[f"b_{g}"] = np.zeros(hidden)
    weights["b_f"] = np.ones(hidden)
    weights["R"] = xavier(N_CLASSES, hidden)
    weights["r"] = np.zeros(N_CLASSES)
    return LstmModel(input_dim=input_dim, hidden=hidden, weights=weights)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lstm_step(
    state: tuple[np.ndarray, np.ndarray],
    x: np.ndarray,
    model: LstmModel,
) -> tuple[np.ndarray, np.ndarray]:
    """One cell update: returns (h', c')."""
    h, c = state
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.input_dim,):
        raise ShapeError(f"input shape {x.shape} != ({model.input_dim},)")
    if h.shape != (model.hidden,) or c.shape != (model.hidden,):
        raise ShapeError("state shape does not match model hidden size")
    w = model.weights
    i = _sigmoid(w["W_i"] @ x + w["U_i"] @ h + w["b_i"])
    f = _sigmoid(w["W_f"] @ x + w["U_f"] @ h + w["b_f"])
    o = _sigmoid(w["W_o"] @ x + w["U_o"] @ h + w["b_o"])
    g = np.tanh(w["W_g"] @ x + w["U_g"] @ h + w["b_g"])
    c_new = f * c + i * g
    h_new = o * np.tanh(c_new)
    return h_new, c_new


def forward(features, model: LstmModel) -> np.ndarray:
    """Logits over classes from the final hidden state."""
    feats = np.asarray(features, dtype=np.float64)
    if feats.ndim != 2 or feats.shape[0] == 0:
        raise ShapeError("forward needs a non-empty (T, F) feature sequence")
    if feats.shape[1] != model.input_dim:
        raise ShapeError(f"feature dim {feats.shape[1]} != {model.input_dim}")
    h = np.zeros(model.hidden)
    c = np.zeros(model.hidden)
    for t in range(feats.shape[0]):
        h, c = lstm_step((h, c), feats[t], model)
    return model.weights["R"] @ h + model.weights["r"]


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def loss(logits: np.ndarray, label: int) -> float:
    """Softmax cross-entropy for one sequence."""
    z = logits - np.max(logits)
    return float(np.log(np.sum(np.exp(z))) - z[label])


# --- batched forward/backward ---------------------------------------------------


def _batch_forward(x: np.ndarray, mask: np.ndarray, model: LstmModel):
    """x: (T, B, F), mask: (T, B). Returns final h plus the tape for BPTT."""
    T, B, _ = x.shape
    H = model.hidden
    W, U, b = model.packed()
    x_pre = x @ W.T  # (T, B, 4H), input contribution for every step at once
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    tape = []
    for t in range(T):
        z = x_pre[t] + h @ U.T + b
        i = _sigmoid(z[:, :H])
        f = _sigmoid(z[:, H:2 * H])
        o = _sigmoid(z[:, 2 * H:3 * H])
        g = np.tanh(z[:, 3 * H:])
        c_cand = f * c + i * g
        tanh_c = np.tanh(c_cand)
        h_cand = o * tanh_c
        m = mask[t][:, None]
        h_next = m * h_cand + (1.0 - m) * h
        c_next = m * c_cand + (1.0 - m) * c
        tape.append((h, c, i, f, o, g, tanh_c))
        h, c = h_next, c_next
    return h, tape


def _batch_backward(
    x: np.ndarray,
    mask: np.ndarray,
    model: LstmModel,
    tape,
    dh: np.ndarray,
) -> dict[str, np.ndarray]:
    T, B, _ = x.shape
    H = model.hidden
    _, U, _ = model.packed()
    dW = np.zeros((4 * H, model.input_dim))
    dU = np.zeros((4 * H, H))
    db = np.zeros(4 * H)
    dc = np.zeros_like(dh)
    for t in range(T - 1, -1, -1):
        h_prev, c_prev, i, f, o, g, tanh_c = tape[t]
        m = mask[t][:, None]
        dh_cand = m * dh
        dc_cand = m * dc
        do = dh_cand * tanh_c
        dc_cand = dc_cand + dh_cand * o * (1.0 - tanh_c * tanh_c)
        di = dc_cand * g
        df = dc_cand * c_prev
        dg = dc_cand * i
        dz = np.concatenate(
            [
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                do * o * (1.0 - o),
                dg * (1.0 - g * g),
            ],
            axis=1,
        )
        dW += dz.T @ x[t]
        dU += dz.T @ h_prev
        db += dz.sum(axis=0)
        dh = dz @ U + (1.0 - m) * dh
        dc = dc_cand * f + (1.0 - m) * dc
    grads: dict[str, np.ndarray] = {}
    for k, g_name in enumerate(GATE_NAMES):
        grads[f"W_{g_name}"] = dW[k * H:(k + 1) * H]
        grads[f"U_{g_name}"] = dU[k * H:(k + 1) * H]
        grads[f"b_{g_name}"] = db[k * H:(k + 1) * H]
    return grads


def batch_loss_and_grads(
    sequences: list[np.ndarray],
    labels: list[int],
    model: LstmModel,
) -> tuple[float, dict[str, np.ndarray], int]:
    """Mean loss and gradients over a mini-batch of variable-length sequences."""
    B = len(sequences)
    T = max(s.shape[0] for s in sequences)
    F = model.input_dim
    x = np.zeros((T, B, F))
    mask = np.zeros((T, B))
    for bi, s in enumerate(sequences):
        x[: s.shape[0], bi] = s
        mask[: s.shape[0], bi] = 1.0
    h_final, tape = _batch_forward(x, mask, model)
    logits = h_final @ model.weights["R"].T + model.weights["r"]
    z = logits - logits.max(axis=1, keepdims=True)
    log_probs = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    y = np.asarray(labels)
    total_loss = float(-log_probs[np.arange(B), y].mean())
    correct = int((logits.argmax(axis=1) == y).sum())

    dlogits = np.exp(log_probs)
    dlogits[np.arange(B), y] -= 1.0
    dlogits /= B
    grads = {"R": dlogits.T @ h_final, "r": dlogits.sum(axis=0)}
    dh = dlogits @ model.weights["R"]
    grads.update(_batch_backward(x, mask, model, tape, dh))
    return total_loss, grads, correct


# --- training --------------------------------------------------------------------


@dataclass
class TrainConfig:
    epochs: int = 32
    lr: float = 0.2
    momentum: float = 0.9
    seed: int = 0
    holdout_fraction: float = 0.2
    batch_size: int = 16
    hidden: int = 32
    grad_clip: float = 1.0  # global-norm clip; long sequences explode without it
    lr_decay: float = 0.92  # multiplicative per-epoch schedule
    # extra null-labeled transition motions appended to the train split only
    # (the holdout stays a clean split of the input dataset)
    hard_negative_count: int = 200


@dataclass
class TrainResult:
    model: LstmModel
    accuracy_curve: list[float] = field(default_factory=list)  # holdout per epoch
    train_accuracy: float = 0.0
    holdout_accuracy: float = 0.0


def featurize_samples(samples: list[GestureSample]) -> tuple[list[np.ndarray], list[int]]:
    feats = [np.asarray(featurize(s.frames)) for s in samples]
    labels = [int(s.label) for s in samples]
    return feats, labels


def evaluate(model: LstmModel, feats: list[np.ndarray], labels: list[int],
             batch_size: int = 64) -> float:
    correct = 0
    for start in range(0, len(feats), batch_size):
        chunk = feats[start:start + batch_size]
        ys = labels[start:start + batch_size]
        B = len(chunk)
        T = max(s.shape[0] for s in chunk)
        x = np.zeros((T, B, model.input_dim))
        mask = np.zeros((T, B))
        for bi, s in enumerate(chunk):
            x[: s.shape[0], bi] = s
            mask[: s.shape[0], bi] = 1.0
        h, _ = _batch_forward(x, mask, model)
        logits = h @ model.weights["R"].T + model.weights["r"]
        correct += int((logits.argmax(axis=1) == np.asarray(ys)).sum())
    return correct / len(feats)


def train(samples: list[GestureSample], config: TrainConfig | None = None) -> TrainResult:
    """Full-BPTT SGD-with-momentum training with a seeded holdout split."""
    config = config or TrainConfig()
    if len({s.label for s in samples}) < 2:
        raise ValueError("training requires at least 2 classes")
    feats, labels = featurize_samples(samples)
    return train_features(feats, labels, config)


def train_features(
    feats: list[np.ndarray],
    labels: list[int],
    config: TrainConfig,
) -> TrainResult:
    rng = np.random.default_rng(config.seed)
    order = rng.permutation(len(feats))
    n_hold = int(round(len(feats) * config.holdout_fraction))
    hold_idx = order[:n_hold]
    train_idx = order[n_hold:]
    tr_f = [feats[i] for i in train_idx]
    tr_y = [labels[i] for i in train_idx]
    ho_f = [feats[i] for i in hold_idx]
    ho_y = [labels[i] for i in hold_idx]
    if config.hard_negative_count > 0:
        from .gestures import GestureClass, featurize, hard_negative_sample

        for k in range(config.hard_negative_count):
            sample = hard_negative_sample(seed=(config.seed << 20) + k)
            tr_f.append(np.asarray(featurize(sample.frames)))
            tr_y.append(int(GestureClass.NULL))

    model = init_model(seed=config.seed, input_dim=feats[0].shape[1], hidden=config.hidden)
    velocity = {name: np.zeros_like(w) for name, w in model.weights.items()}
    curve: list[float] = []
    lr = config.lr
    for epoch in range(config.epochs):
        perm = rng.permutation(len(tr_f))
        for start in range(0, len(perm), config.batch_size):
            idx = perm[start:start + config.batch_size]
            seqs = [tr_f[i] for i in idx]
            ys = [tr_y[i] for i in idx]
            batch_loss, grads, _ = batch_loss_and_grads(seqs, ys, model)
            if not math.isfinite(batch_loss):
                raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
            if config.grad_clip > 0.0:
                gnorm = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
                if gnorm > config.grad_clip:
                    scale = config.grad_clip / gnorm
                    for g in grads.values():
                        g *= scale
            for name, g in grads.items():
                v = velocity[name]
                v *= config.momentum
                v -= lr * g
                model.weights[name] += v
        lr *= config.lr_decay
        curve.append(evaluate(model, ho_f, ho_y) if ho_f else float("nan"))

    return TrainResult(
        model=model,
        accuracy_curve=curve,
        train_accuracy=evaluate(model, tr_f, tr_y),
        holdout_accuracy=evaluate(model, ho_f, ho_y) if ho_f else float("nan"),
    )


# --- gradient checking -------------------------------------------------------------


def finite_difference_grads(
    sequences: list[np.ndarray],
    labels: list[int],
    model: LstmModel,
    step: float = 1e-5,
) -> dict[str, np.ndarray]:
    """Central-difference loss gradients; the independent oracle for BPTT."""
    grads = {}
    for name, w in model.weights.items():
        g = np.zeros_like(w)
        flat = w.reshape(-1)
        gf = g.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + step
            lp = _mean_loss(sequences, labels, model)
            flat[k] = orig - step
            lm = _mean_loss(sequences, labels, model)
            flat[k] = orig
            gf[k] = (lp - lm) / (2.0 * step)
        grads[name] = g
    return grads


def _mean_loss(sequences, labels, model) -> float:
    total = 0.0
    for s, y in zip(sequences, labels):
        total += loss(forward(s, model), y)
    return total / len(sequences)


def max_relative_gradient_error(
    analytic: dict[str, np.ndarray],
    numeric: dict[str, np.ndarray],
) -> float:
    worst = 0.0
    for name in analytic:
        a = analytic[name].reshape(-1)
        n = numeric[name].reshape(-1)
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


# --- persistence --------------------------------------------------------------------


def save_model(model: LstmModel, path: str | Path) -> None:
    doc = {
        "version": 1,
        "input_dim": model.input_dim,
        "hidden": model.hidden,
        "weights": {
            name: [float(v) for v in model.weights[name].reshape(-1)]
            for name in WEIGHT_NAMES
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_model(path: str | Path) -> LstmModel:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != 1:
        raise ValueError(f"unsupported model file version {doc.get('version')}")
    F, H = int(doc["input_dim"]), int(doc["hidden"])
    shapes = {f"W_{g}": (H, F) for g in GATE_NAMES}
    shapes.update({f"U_{g}": (H, H) for g in GATE_NAMES})
    shapes.update({f"b_{g}": (H,) for g in GATE_NAMES})
    shapes["R"] = (N_CLASSES, H)
    shapes["r"] = (N_CLASSES,)
    weights = {
        name: np.asarray(doc["weights"][name], dtype=np.float64).reshape(shape)
        for name, shape in shapes.items()
    }
    return LstmModel(input_dim=F, hidden=H, weights=weights)
