"""Linear softmax classifier on fixed embeddings.

Training is deterministic full-batch gradient descent on the convex
cross-entropy plus L2 objective; the analytic gradient is checked against
finite differences in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyIncludeError,
    NonFiniteLossError,
    ParseError,
)
from .labels import SoftLabelMatrix


@dataclass(frozen=True)
class LinearClassifier:
    """Projection to class logits, plus the optional input-width reducer."""

    w: np.ndarray  # (d, C)
    reducer: np.ndarray | None = None  # (f, d), applied to raw features


@dataclass(frozen=True)
class TrainConfig:
    lr: float
    epochs: int
    weight_decay: float = 0.0
    lr_decay_epoch: int = 10**9  # halve the lr once this epoch is reached
    seed: int = 0

    def __post_init__(self):
        if self.lr <= 0.0:
            raise ValueError("lr must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.weight_decay < 0.0:
            raise ValueError("weight_decay must be >= 0")


def softmax_with_log(logits: np.ndarray):
    """Row-stabilized softmax; returns (probabilities, log-probabilities).

    Single kernel shared by the loss, the gradient, and prediction.
    """
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    z = e.sum(axis=1, keepdims=True)
    return e / z, shifted - np.log(z)


def _included(h: np.ndarray, labels: SoftLabelMatrix, include) -> tuple:
    include = np.asarray(include, dtype=np.int64).ravel()
    if include.size == 0:
        raise EmptyIncludeError("empty node subset")
    if labels.masked[include].any():
        raise ValueError("include contains masked label rows")
    return h[include], labels.y[include], include.size


def softmax_cross_entropy(
    h: np.ndarray, labels: SoftLabelMatrix, w: np.ndarray, include
) -> float:
    """Mean soft-label cross-entropy over the included nodes."""
    h_inc, y_inc, count = _included(h, labels, include)
    _, logp = softmax_with_log(h_inc @ w)
    return float(-(y_inc * logp).sum() / count)


def grad_wcls(
    h: np.ndarray, labels: SoftLabelMatrix, w: np.ndarray, include
) -> np.ndarray:
    """Analytic gradient of the mean cross-entropy with respect to w."""
    h_inc, y_inc, count = _included(h, labels, include)
    probs, _ = softmax_with_log(h_inc @ w)
    return h_inc.T @ (probs - y_inc) / count


def train_linear(
    h: np.ndarray,
    labels: SoftLabelMatrix,
    include,
    cfg: TrainConfig,
    warm_start: np.ndarray | None = None,
    epoch_offset: int = 0,
) -> LinearClassifier:
    """Full-batch gradient descent with weight decay and a single lr halving.

    ``epoch_offset`` lets a curriculum thread one lr schedule through several
    consecutive training calls.
    """
    d = h.shape[1]
    num_classes = labels.y.shape[1]
    if warm_start is not None:
        w = np.array(warm_start, dtype=np.float64, copy=True)
        if w.shape != (d, num_classes):
            raise DimensionMismatchError("warm start shape mismatch")
    else:
        w = np.zeros((d, num_classes))
    if cfg.epochs == 0:
        return LinearClassifier(w=w)

    h_inc, y_inc, count = _included(h, labels, include)
    for epoch in range(cfg.epochs):
        lr = cfg.lr * (0.5 if epoch + epoch_offset >= cfg.lr_decay_epoch else 1.0)
        probs, logp = softmax_with_log(h_inc @ w)
        loss = -(y_inc * logp).sum() / count
        if cfg.weight_decay:
            loss += 0.5 * cfg.weight_decay * float(np.sum(w * w))
        if not math.isfinite(loss):
            raise NonFiniteLossError(f"loss diverged at epoch {epoch}")
        grad = h_inc.T @ (probs - y_inc) / count
        if cfg.weight_decay:
            grad = grad + cfg.weight_decay * w
        w = w - lr * grad
    return LinearClassifier(w=w)


def predict(h: np.ndarray, clf: LinearClassifier):
    """Hard labels (argmax, ties to the lower class) and the probability rows."""
    probs, _ = softmax_with_log(h @ clf.w)
    return probs.argmax(axis=1), probs


def accuracy(pred: np.ndarray, truth: np.ndarray, subset=None) -> float:
    """Fraction of correct hard labels, optionally restricted to a subset."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if subset is not None:
        subset = np.asarray(subset, dtype=np.int64)
        pred = pred[subset]
        truth = truth[subset]
    if pred.size == 0:
        return float("nan")
    return float((pred == truth).mean())


def make_reducer(f: int, d: int, seed: int) -> np.ndarray:
    """Fixed seeded projection from feature width f to working width d.

    Orthonormal columns via QR when f >= d, a scaled Gaussian otherwise.
    """
    rng = np.random.default_rng(seed)
    gauss = rng.standard_normal((f, d))
    if f >= d:
        q, r = np.linalg.qr(gauss)
        signs = np.sign(np.diag(r))
        signs[signs == 0.0] = 1.0
        return q * signs
    return gauss / math.sqrt(f)


def save_classifier(clf: LinearClassifier, path) -> None:
    """Write the logit matrix as CSV with a `d,C` header line."""
    d, c = clf.w.shape
    lines = [f"{d},{c}"]
    for row in clf.w:
        lines.append(",".join(format(v, ".17g") for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_classifier(path) -> LinearClassifier:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ParseError(path, 1, "empty classifier file")
    try:
        d, c = (int(tok) for tok in lines[0].split(","))
    except ValueError as err:
        raise ParseError(path, 1, f"bad header: {err}") from err
    if len(lines) != d + 1:
        raise ParseError(path, len(lines), f"expected {d} weight rows")
    w = np.zeros((d, c))
    for i, line in enumerate(lines[1:], start=2):
        toks = line.split(",")
        if len(toks) != c:
            raise ParseError(path, i, f"expected {c} columns")
        try:
            w[i - 2] = [float(t) for t in toks]
        except ValueError as err:
            raise ParseError(path, i, f"bad float: {err}") from err
    return LinearClassifier(w=w)
