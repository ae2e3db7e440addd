"""Losses returning ``(loss, gradient w.r.t. the input)``.

Per-example forms are elementwise over arrays; ``*_mean`` forms average
over a batch and scale the gradient accordingly.
"""

import numpy as np
from scipy.special import expit, log_softmax


def _check_finite(x, what):
    if not np.all(np.isfinite(x)):
        raise FloatingPointError(f"non-finite {what}")


def loss_bce_logits(z, y):
    """Binary cross-entropy on logits: ``max(z, 0) - z*y + log(1 + exp(-|z|))``."""
    z = np.asarray(z)
    _check_finite(z, "logit")
    loss = np.maximum(z, 0) - z * y + np.log1p(np.exp(-np.abs(z)))
    grad = expit(z) - y
    return loss, grad


def loss_cross_entropy(scores, cls):
    """Softmax cross-entropy for one score vector (or a batch of rows)."""
    scores = np.asarray(scores)
    _check_finite(scores, "score")
    if scores.shape[-1] < 2:
        raise ValueError("cross-entropy needs at least two scores")
    cls = np.asarray(cls)
    if np.any(cls < 0) or np.any(cls >= scores.shape[-1]):
        raise IndexError(f"class index out of range for {scores.shape[-1]} scores")
    logp = log_softmax(scores, axis=-1)
    picked = np.take_along_axis(np.atleast_2d(logp), np.atleast_1d(cls)[:, None], axis=1)[:, 0]
    grad = np.exp(np.atleast_2d(logp))
    grad[np.arange(grad.shape[0]), np.atleast_1d(cls)] -= 1
    if scores.ndim == 1:
        return -picked[0], grad[0]
    return -picked, grad


def loss_mse(pred, target):
    pred, target = np.asarray(pred), np.asarray(target)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    diff = pred - target
    n = diff.size
    return float(np.sum(diff * diff) / n), 2 * diff / n


def bce_logits_mean(z, y):
    loss, grad = loss_bce_logits(z, y)
    n = len(loss)
    return float(np.mean(loss)), grad / n


def cross_entropy_mean(scores, cls):
    loss, grad = loss_cross_entropy(scores, cls)
    n = len(loss)
    return float(np.mean(loss)), grad / n
