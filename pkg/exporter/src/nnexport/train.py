"""Desk-scale training of small rectifier classifiers on the 8x8 digit images.

The point is to produce networks whose regions the counting tool can
enumerate in seconds, so hidden sizes are capped at 16 neurons total.
Training is plain minibatch SGD on softmax cross-entropy, fully
deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_HIDDEN_NEURONS = 16
NUM_CLASSES = 10
TRAIN_SPLIT = 1500  # fixed index split of the 1797-sample digit set


@dataclass
class TrainedModel:
    widths: tuple
    seed: int
    epochs: int
    weights: list  # hidden weight matrices plus the linear readout, in order
    biases: list
    train_cross_entropy: float
    test_error_rate: float

    @property
    def activations(self):
        return ["relu"] * len(self.widths) + ["linear"]


def load_digit_data():
    """8x8 digit images scaled to [0,1]; fixed train/test index split.

    Fails loudly when scikit-learn (the bundled dataset's home) is absent.
    """
    try:
        from sklearn.datasets import load_digits
    except ImportError as exc:  # pragma: no cover - environment guard
        raise RuntimeError(
            "scikit-learn is required for the bundled 8x8 digit dataset"
        ) from exc
    digits = load_digits()
    X = digits.data / 16.0
    y = digits.target
    return (
        X[:TRAIN_SPLIT],
        y[:TRAIN_SPLIT],
        X[TRAIN_SPLIT:],
        y[TRAIN_SPLIT:],
    )


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _forward(params, X):
    """Returns the per-layer ReLU activations and the readout logits."""
    hs = [X]
    h = X
    for W, b in params[:-1]:
        h = np.maximum(h @ W.T + b, 0.0)
        hs.append(h)
    W, b = params[-1]
    return hs, h @ W.T + b


def cross_entropy(logits, y):
    p = _softmax(logits)
    return float(-np.mean(np.log(p[np.arange(len(y)), y] + 1e-12)))


def error_rate(logits, y):
    return float(np.mean(logits.argmax(axis=1) != y))


def train_small(widths, seed, epochs=20, lr=0.5, batch_size=32):
    """Train a rectifier classifier with the given hidden widths.

    Deterministic for a given seed (initialization and shuffling both come
    from one generator); the total hidden size must stay countable.
    """
    widths = tuple(int(w) for w in widths)
    if any(w < 1 for w in widths):
        raise ValueError("widths must be positive")
    if sum(widths) > MAX_HIDDEN_NEURONS:
        raise ValueError(
            f"sum(widths) = {sum(widths)} exceeds the countable cap "
            f"{MAX_HIDDEN_NEURONS}"
        )
    X_train, y_train, X_test, y_test = load_digit_data()
    n0 = X_train.shape[1]
    rng = np.random.default_rng(seed)

    params = []
    fan = n0
    for w in widths + (NUM_CLASSES,):
        scale = np.sqrt(2.0 / fan)
        params.append([scale * rng.normal(size=(w, fan)), np.zeros(w)])
        fan = w

    n = len(X_train)
    onehot = np.eye(NUM_CLASSES)[y_train]
    for _ in range(int(epochs)):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            Xb, Yb = X_train[idx], onehot[idx]
            hs, logits = _forward(params, Xb)
            grad = (_softmax(logits) - Yb) / len(idx)
            for l in range(len(params) - 1, -1, -1):
                W, b = params[l]
                gW = grad.T @ hs[l]
                gb = grad.sum(axis=0)
                if l > 0:
                    grad = (grad @ W) * (hs[l] > 0.0)
                W -= lr * gW
                b -= lr * gb

    _, logits_train = _forward(params, X_train)
    _, logits_test = _forward(params, X_test)
    return TrainedModel(
        widths=widths,
        seed=int(seed),
        epochs=int(epochs),
        weights=[W.copy() for W, _ in params],
        biases=[b.copy() for _, b in params],
        train_cross_entropy=cross_entropy(logits_train, y_train),
        test_error_rate=error_rate(logits_test, y_test),
    )
