"""Elementwise activations, softmax, and loss functions.

Activations preserve the input dtype so the same code runs the float32
training path and the float64 gradient-check oracle. softmax always
computes and returns float64: probability vectors must sum to 1 within
1e-9, which single precision cannot guarantee.
"""

import numpy as np

from stylesearch.errors import ShapeError

ACTIVATIONS = ("relu", "sigmoid", "linear")

CROSS_ENTROPY_EPS = 1e-12


def activation(kind: str, x: np.ndarray) -> np.ndarray:
    if kind == "relu":
        return np.maximum(x, 0)
    if kind == "sigmoid":
        return _sigmoid(x)
    if kind == "linear":
        return x
    raise ValueError(f"unknown activation {kind!r}")


def activation_grad(kind: str, post: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Gradient through an activation, derived from its output value.

    relu(x) > 0 exactly where x > 0, and sigmoid's derivative is
    post * (1 - post), so the pre-activation never needs caching.
    """
    if kind == "relu":
        return grad * (post > 0)
    if kind == "sigmoid":
        return grad * post * (1 - post)
    if kind == "linear":
        return grad
    raise ValueError(f"unknown activation {kind!r}")


def _sigmoid(x):
    # Split by sign to avoid exp overflow on large negatives.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1 / (1 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1 + ex)
    return out


def softmax(x: np.ndarray) -> np.ndarray:
    """Shift-invariant softmax over the last axis, in double precision."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ShapeError("softmax of an empty vector")
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def mse(prediction: np.ndarray, target: np.ndarray) -> float:
    prediction = np.asarray(prediction)
    target = np.asarray(target)
    if prediction.shape != target.shape:
        raise ShapeError(f"mse shapes differ: {prediction.shape} vs {target.shape}")
    diff = prediction - target
    return float(np.mean(diff * diff))


def mse_grad(prediction: np.ndarray, target: np.ndarray) -> np.ndarray:
    """d(mse)/d(prediction) = 2 (prediction - target) / n."""
    if prediction.shape != target.shape:
        raise ShapeError(f"mse shapes differ: {prediction.shape} vs {target.shape}")
    return 2.0 * (prediction - target) / prediction.size


def categorical_cross_entropy(prediction: np.ndarray, target: np.ndarray) -> float:
    """-sum(target * ln(prediction)), prediction clamped at 1e-12."""
    prediction = np.asarray(prediction, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if prediction.shape != target.shape:
        raise ShapeError(f"cross-entropy shapes differ: {prediction.shape} vs {target.shape}")
    clamped = np.maximum(prediction, CROSS_ENTROPY_EPS)
    return float(-np.sum(target * np.log(clamped)))


def loss(kind: str, prediction: np.ndarray, target: np.ndarray) -> float:
    if kind == "mse":
        return mse(prediction, target)
    if kind == "categorical_cross_entropy":
        return categorical_cross_entropy(prediction, target)
    raise ValueError(f"unknown loss {kind!r}")


def softmax_cross_entropy(logits: np.ndarray, onehot: np.ndarray):
    """Mean cross-entropy over a batch of logits, plus its gradient.

    Returns (loss, d loss / d logits). The combined gradient
    (probabilities - onehot) / batch is exact and numerically stable,
    so classifier training never differentiates through softmax itself.
    """
    logits = np.atleast_2d(logits)
    onehot = np.atleast_2d(onehot)
    if logits.shape != onehot.shape:
        raise ShapeError(f"logit/target shapes differ: {logits.shape} vs {onehot.shape}")
    probs = softmax(logits)
    n = logits.shape[0]
    total = -np.sum(onehot * np.log(np.maximum(probs, CROSS_ENTROPY_EPS)))
    grad = (probs - onehot) / n
    return float(total / n), grad
