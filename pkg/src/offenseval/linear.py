"""Logistic regression, multinomial naive Bayes and hinge-loss SGD on sparse features."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import expit, log_softmax, logsumexp, softmax

from . import _kernels
from .features import SparseVector, to_csr

LOGISTIC = "logistic"
HINGE = "hinge"


@dataclass
class FitConfig:
    l2_lambda: float = 1e-4
    learning_rate: Optional[float] = None  # None -> 0.1 for LR, 0.01 for hinge SGD
    max_epochs: int = 500
    tol: float = 1e-6
    n_iter_no_change: int = 5  # hinge SGD only: epochs below tol before stopping
    seed: int = 0

    def lr_for(self, kind: str) -> float:
        if self.learning_rate is not None:
            return self.learning_rate
        return 0.1 if kind == LOGISTIC else 0.01


@dataclass
class LinearModel:
    """Linear scorer. Binary models hold one row scoring ``classes[1]``."""

    weights: np.ndarray
    bias: np.ndarray
    classes: tuple
    kind: str = LOGISTIC
    loss_history: list = field(default_factory=list, repr=False, compare=False)

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    @property
    def binary(self) -> bool:
        return self.weights.shape[0] == 1


@dataclass
class NaiveBayesModel:
    log_prior: np.ndarray
    log_likelihood: np.ndarray
    alpha: float
    classes: tuple

    @property
    def n_features(self) -> int:
        return self.log_likelihood.shape[1]


def as_matrix(X, n_features: Optional[int] = None) -> sp.csr_matrix:
    """Accept a CSR matrix, a dense array or a list of ``SparseVector``."""
    if sp.issparse(X):
        M = sp.csr_matrix(X, dtype=np.float64)
    elif isinstance(X, np.ndarray):
        M = sp.csr_matrix(np.atleast_2d(X).astype(np.float64))
    else:
        X = list(X)
        if X and not isinstance(X[0], SparseVector):
            M = sp.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))
        else:
            M = to_csr(X, n_features)
    if n_features is not None and M.shape[1] != n_features:
        raise ValueError(f"dimension mismatch: got {M.shape[1]} features, model has {n_features}")
    return M


def _encode_labels(y, classes):
    if classes is None:
        classes = tuple(sorted(set(y)))
    classes = tuple(classes)
    pos = {c: i for i, c in enumerate(classes)}
    try:
        codes = np.array([pos[v] for v in y], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"label {exc.args[0]!r} not in classes {classes}") from None
    if len(classes) < 2:
        raise ValueError("need at least two classes")
    if len(np.unique(codes)) < 2:
        raise ValueError("training labels contain a single class")
    return classes, codes


def lr_objective(W, b, X, codes, l2_lambda):
    """Mean cross-entropy plus ``l2_lambda / 2 * ||W||^2`` and its gradient.

    Binary problems (``W`` with one row) use the sigmoid of the single score;
    otherwise softmax over rows.

    Returns:
        ``(loss, dW, db)``
    """
    n = X.shape[0]
    scores = np.asarray(X @ W.T) + b
    if W.shape[0] == 1:
        z = scores[:, 0]
        t = codes.astype(np.float64)
        loss = np.mean(np.maximum(z, 0) - z * t + np.log1p(np.exp(-np.abs(z))))
        r = (expit(z) - t)[:, None] / n
    else:
        logp = log_softmax(scores, axis=1)
        loss = -np.mean(logp[np.arange(n), codes])
        r = np.exp(logp)
        r[np.arange(n), codes] -= 1.0
        r /= n
    loss += 0.5 * l2_lambda * float(np.sum(W * W))
    dW = np.asarray((X.T @ r).T) + l2_lambda * W
    db = r.sum(axis=0)
    return float(loss), dW, db


def lr_fit(X, y, cfg: FitConfig = FitConfig(), classes: Optional[Sequence] = None) -> LinearModel:
    """Full-batch gradient descent from zero weights.

    A step that would raise the objective is retried at half the step size,
    so the recorded loss never increases. Stops once an accepted step gains
    less than ``cfg.tol`` or after ``cfg.max_epochs`` steps.
    """
    classes, codes = _encode_labels(y, classes)
    X = as_matrix(X)
    if X.shape[0] != len(codes):
        raise ValueError(f"{X.shape[0]} rows but {len(codes)} labels")
    k = 1 if len(classes) == 2 else len(classes)
    W = np.zeros((k, X.shape[1]))
    b = np.zeros(k)
    step = cfg.lr_for(LOGISTIC)
    loss, dW, db = lr_objective(W, b, X, codes, cfg.l2_lambda)
    history = [loss]
    for _ in range(cfg.max_epochs):
        for _halving in range(60):
            W_new, b_new = W - step * dW, b - step * db
            new_loss, new_dW, new_db = lr_objective(W_new, b_new, X, codes, cfg.l2_lambda)
            if new_loss <= loss:
                break
            step *= 0.5
        else:
            break
        gain = loss - new_loss
        W, b, loss, dW, db = W_new, b_new, new_loss, new_dW, new_db
        history.append(loss)
        if gain < cfg.tol:
            break
    return LinearModel(W, b, classes, LOGISTIC, history)


def linear_scores(m: LinearModel, X) -> np.ndarray:
    X = as_matrix(X, m.n_features)
    scores = np.asarray(X @ m.weights.T) + m.bias
    if not np.all(np.isfinite(scores)):
        raise FloatingPointError("non-finite score")
    return scores


def lr_predict_proba(m: LinearModel, X) -> np.ndarray:
    """Class probabilities, one row per document, columns in ``m.classes`` order."""
    scores = linear_scores(m, X)
    if m.binary:
        p = expit(scores[:, 0])
        return np.column_stack([1.0 - p, p])
    return softmax(scores, axis=1)


def linear_predict(m: LinearModel, X) -> list:
    """Highest-scoring class; exact ties go to the earlier class."""
    scores = linear_scores(m, X)
    if m.binary:
        return [m.classes[1] if z > 0 else m.classes[0] for z in scores[:, 0]]
    return [m.classes[i] for i in np.argmax(scores, axis=1)]


def nb_fit(X, y, alpha: float = 1.0, classes: Optional[Sequence] = None) -> NaiveBayesModel:
    """Multinomial naive Bayes with additive smoothing ``alpha``."""
    classes = tuple(sorted(set(y))) if classes is None else tuple(classes)
    pos = {c: i for i, c in enumerate(classes)}
    codes = np.array([pos[v] for v in y], dtype=np.int64)
    X = as_matrix(X)
    if X.nnz and X.data.min() < 0:
        raise ValueError("naive Bayes needs nonnegative feature values")
    k, V = len(classes), X.shape[1]
    counts = np.zeros((k, V))
    n_c = np.bincount(codes, minlength=k)
    for c in range(k):
        if n_c[c] == 0:
            raise ValueError(f"class {classes[c]!r} has no training documents")
        counts[c] = np.asarray(X[codes == c].sum(axis=0)).ravel()
    log_prior = np.log(n_c / n_c.sum())
    smoothed = counts + alpha
    log_likelihood = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
    return NaiveBayesModel(log_prior, log_likelihood, alpha, classes)


def nb_joint_log_likelihood(m: NaiveBayesModel, X) -> np.ndarray:
    X = as_matrix(X, m.n_features)
    return np.asarray(X @ m.log_likelihood.T) + m.log_prior


def nb_predict_proba(m: NaiveBayesModel, X) -> np.ndarray:
    jll = nb_joint_log_likelihood(m, X)
    return np.exp(jll - logsumexp(jll, axis=1, keepdims=True))


def nb_predict(m: NaiveBayesModel, X) -> list:
    jll = nb_joint_log_likelihood(m, X)
    return [m.classes[i] for i in np.argmax(jll, axis=1)]


def hinge_objective(w, b, X, t, l2_lambda) -> float:
    """Mean hinge loss over ``t`` in {-1, +1} plus ``l2_lambda / 2 * ||w||^2``."""
    z = np.asarray(X @ w).ravel() + b
    return float(np.mean(np.maximum(0.0, 1.0 - t * z)) + 0.5 * l2_lambda * np.dot(w, w))


def _hinge_binary(X, t, cfg, step, history):
    n, d = X.shape
    w = np.zeros(d)
    scale, b = 1.0, 0.0
    rng = np.random.default_rng(cfg.seed)
    indptr = X.indptr.astype(np.int64)
    indices = X.indices.astype(np.int64)
    data = np.ascontiguousarray(X.data, dtype=np.float64)
    best, stale = np.inf, 0
    for _ in range(cfg.max_epochs):
        order = rng.permutation(n).astype(np.int64)
        scale, b, _ = _kernels.hinge_sgd_epoch(indptr, indices, data, t, order, w,
                                               scale, b, step, cfg.l2_lambda)
        w *= scale
        scale = 1.0
        obj = hinge_objective(w, b, X, t, cfg.l2_lambda)
        history.append(obj)
        if not np.isfinite(obj):
            raise FloatingPointError("hinge SGD diverged")
        if obj > best - cfg.tol:
            stale += 1
            if stale >= cfg.n_iter_no_change:
                break
        else:
            stale = 0
        best = min(best, obj)
    return w, b


def hinge_sgd_fit(X, y, cfg: FitConfig = FitConfig(),
                  classes: Optional[Sequence] = None) -> LinearModel:
    """Per-example SGD on the L2-regularized hinge loss.

    Binary problems train one scorer for ``classes[1]``; more classes use
    one-vs-rest, each scorer replaying the same seeded epoch orders.
    """
    classes, codes = _encode_labels(y, classes)
    X = as_matrix(X)
    if X.shape[0] != len(codes):
        raise ValueError(f"{X.shape[0]} rows but {len(codes)} labels")
    step = cfg.lr_for(HINGE)
    if not 0 <= step * cfg.l2_lambda < 1:
        raise ValueError("learning_rate * l2_lambda must lie in [0, 1)")
    targets = [1] if len(classes) == 2 else range(len(classes))
    rows, biases, history = [], [], []
    for c in targets:
        t = np.where(codes == c, 1.0, -1.0)
        w, b = _hinge_binary(X, t, cfg, step, history)
        rows.append(w)
        biases.append(b)
    return LinearModel(np.vstack(rows), np.array(biases), classes, HINGE, history)
