"""Fixed-architecture text classifiers (LSTM, BiLSTM, CNN) and their training loop.

Every network is Embedding -> encoder -> dropout -> Dense. Binary tasks use a
single logit scored with BCE-with-logits; three-class tasks use softmax
cross-entropy.

Randomness comes from one ``numpy.random.Generator(PCG64(seed))``. Draw
order: parameter init (embedding, forward LSTM W then U, backward LSTM W then
U, conv filters, dense), then per epoch one permutation of the training set
followed by one dropout mask per batch.
"""

from __future__ import annotations

import copy
import csv
import io
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..evaluation import evaluate
from . import layers as L
from .losses import bce_logits_mean, cross_entropy_mean
from .optim import AdamState, adam_step, sgd_step

log = logging.getLogger(__name__)

ARCHS = ("lstm", "bilstm", "cnn")

# Default epoch budgets: (task A, tasks B/C).
DEFAULT_EPOCHS = {"lstm": (8, 7), "bilstm": (7, 6), "cnn": (10, 10)}


def default_epochs(arch: str, task: str) -> int:
    a, bc = DEFAULT_EPOCHS[arch]
    return a if task == "A" else bc


@dataclass
class TrainConfig:
    epochs: int = 7
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    l2_lambda: float = 1e-5
    dropout_p: float = 0.5
    patience: Optional[int] = 2  # None disables early stopping
    seed: int = 0
    emb_dim: Optional[int] = None  # None -> 60 for LSTMs, 100 for the CNN
    hidden: int = 100
    n_filters: int = 100
    window: int = 3
    dtype: str = "float32"

    def __post_init__(self):
        if not 0 <= self.dropout_p < 1:
            raise ValueError("dropout_p must lie in [0, 1)")
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epochs < 1:
            raise ValueError("learning_rate, batch_size and epochs must be positive")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")

    def embedding_dim(self, arch: str) -> int:
        if self.emb_dim is not None:
            return self.emb_dim
        return 100 if arch == "cnn" else 60

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainHistory:
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    val_acc: list = field(default_factory=list)
    val_macro_f1: list = field(default_factory=list)
    best_epoch: int = 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", "train_loss", "val_loss", "val_acc", "val_macro_f1"])
        for i, row in enumerate(zip(self.train_loss, self.val_loss, self.val_acc,
                                    self.val_macro_f1), start=1):
            w.writerow([i, *(repr(float(x)) for x in row)])
        return buf.getvalue()


@dataclass
class Network:
    arch: str
    classes: tuple
    params: dict
    max_len: int
    window: int = 3

    @property
    def binary(self) -> bool:
        return len(self.classes) == 2

    @property
    def dtype(self):
        return self.params["embedding"].dtype


class EarlyStopping:
    """Track the best validation loss; signal a stop after ``patience`` non-improving epochs."""

    def __init__(self, patience: Optional[int]):
        self.patience = patience
        self.best = math.inf
        self.best_epoch = 0
        self.stale = 0

    def update(self, epoch: int, val_loss: float) -> tuple[bool, bool]:
        """Returns ``(improved, should_stop)``."""
        if val_loss < self.best:
            self.best, self.best_epoch, self.stale = val_loss, epoch, 0
            return True, False
        self.stale += 1
        return False, self.patience is not None and self.stale >= self.patience


def _glorot(rng, shape, fan_in, fan_out, dtype):
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


def _init_lstm(rng, D, H, dtype):
    W = np.concatenate([_glorot(rng, (H, D), D, H, dtype) for _ in range(4)])
    U = np.concatenate([_glorot(rng, (H, H), H, H, dtype) for _ in range(4)])
    b = np.zeros(4 * H, dtype=dtype)
    b[H:2 * H] = 1.0
    return W, U, b


def init_network(arch: str, n_rows: int, classes, max_len: int,
                 cfg: TrainConfig, rng: np.random.Generator) -> Network:
    """Seeded Glorot-uniform weights, zero biases, LSTM forget-gate bias 1, zero PAD row."""
    if arch not in ARCHS:
        raise ValueError(f"unknown architecture {arch!r}")
    dtype = np.dtype(cfg.dtype)
    E = cfg.embedding_dim(arch)
    H = cfg.hidden
    out = 1 if len(classes) == 2 else len(classes)
    params = {"embedding": _glorot(rng, (n_rows, E), n_rows, E, dtype)}
    params["embedding"][0] = 0
    if arch in ("lstm", "bilstm"):
        params["lstm_W"], params["lstm_U"], params["lstm_b"] = _init_lstm(rng, E, H, dtype)
        readout = H
        if arch == "bilstm":
            (params["lstm_bwd_W"], params["lstm_bwd_U"],
             params["lstm_bwd_b"]) = _init_lstm(rng, E, H, dtype)
            readout = 2 * H
    else:
        if max_len < cfg.window:
            raise ValueError(f"max_len {max_len} shorter than the convolution window {cfg.window}")
        kE = cfg.window * E
        params["conv_W"] = _glorot(rng, (cfg.n_filters, kE), kE, cfg.n_filters, dtype)
        params["conv_b"] = np.zeros(cfg.n_filters, dtype=dtype)
        readout = cfg.n_filters
    params["dense_W"] = _glorot(rng, (out, readout), readout, out, dtype)
    params["dense_b"] = np.zeros(out, dtype=dtype)
    return Network(arch, tuple(classes), params, max_len, cfg.window)


def _lstm(params, prefix):
    return L.LstmParams(params[prefix + "W"], params[prefix + "U"], params[prefix + "b"])


def forward(net: Network, ids, lengths, train: bool = False, dropout_p: float = 0.0, rng=None):
    """Scores ``(B, 1)`` (binary) or ``(B, K)`` plus a cache for :func:`backward`."""
    p = net.params
    ids = np.asarray(ids)
    lengths = np.asarray(lengths, dtype=np.int64)
    x = L.embed_forward(ids, p["embedding"])
    if net.arch == "lstm":
        h, enc_cache = L.lstm_forward(x, _lstm(p, "lstm_"), lengths)
    elif net.arch == "bilstm":
        h, enc_cache = L.bilstm_forward(x, _lstm(p, "lstm_"), _lstm(p, "lstm_bwd_"), lengths)
    else:
        h, enc_cache = L.conv_pool_forward(x, L.ConvParams(p["conv_W"], p["conv_b"], net.window),
                                           lengths)
    hd, mask = L.dropout_apply(h, dropout_p, train, rng)
    scores = L.dense_forward(hd, p["dense_W"], p["dense_b"])
    return scores, (ids, enc_cache, hd, mask)


def backward(net: Network, cache, d_scores) -> dict:
    ids, enc_cache, hd, mask = cache
    p = net.params
    dhd, dW, db = L.dense_backward(d_scores, hd, p["dense_W"])
    grads = {"dense_W": dW, "dense_b": db}
    dh = dhd if mask is None else dhd * mask
    if net.arch == "lstm":
        dx, g = L.lstm_backward(dh, enc_cache)
        grads.update(lstm_W=g.W, lstm_U=g.U, lstm_b=g.b)
    elif net.arch == "bilstm":
        dx, gf, gb = L.bilstm_backward(dh, enc_cache)
        grads.update(lstm_W=gf.W, lstm_U=gf.U, lstm_b=gf.b,
                     lstm_bwd_W=gb.W, lstm_bwd_U=gb.U, lstm_bwd_b=gb.b)
    else:
        dx, g = L.conv_pool_backward(dh, enc_cache)
        grads.update(conv_W=g.W, conv_b=g.b)
    grads["embedding"] = L.embed_backward(ids, dx, p["embedding"].shape[0])
    return grads


def batch_loss(net: Network, scores, y):
    """Mean loss and its gradient w.r.t. the scores; ``y`` holds class indices."""
    if net.binary:
        loss, g = bce_logits_mean(scores[:, 0], np.asarray(y, dtype=scores.dtype))
        return loss, g[:, None].astype(scores.dtype)
    loss, g = cross_entropy_mean(scores, np.asarray(y))
    return loss, g.astype(scores.dtype)


def _trim(ids, lengths, minimum):
    # Columns past the longest row in the batch are padding on every row.
    T = max(int(lengths.max()) if len(lengths) else 0, minimum, 1)
    return ids[:, :T]


def predict_proba(net: Network, ids, lengths, batch_size: int = 256) -> np.ndarray:
    """Class probabilities in ``net.classes`` order, dropout disabled."""
    ids = np.asarray(ids)
    lengths = np.asarray(lengths, dtype=np.int64)
    if ids.ndim != 2 or ids.shape[1] != net.max_len:
        raise ValueError(f"expected sequences of length {net.max_len}, got shape {ids.shape}")
    out = []
    minimum = net.window if net.arch == "cnn" else 1
    for s in range(0, len(ids), batch_size):
        lb = lengths[s:s + batch_size]
        scores, _ = forward(net, _trim(ids[s:s + batch_size], lb, minimum), lb)
        out.append(_probs(net, scores.astype(np.float64)))
    if not out:
        return np.zeros((0, len(net.classes)))
    return np.concatenate(out)


def _probs(net, scores):
    if net.binary:
        z = scores[:, 0]
        p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
        return np.column_stack([1 - p, p])
    e = np.exp(scores - scores.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def predict_labels(net: Network, ids, lengths, batch_size: int = 256) -> list:
    ids = np.asarray(ids)
    lengths = np.asarray(lengths, dtype=np.int64)
    if ids.ndim != 2 or ids.shape[1] != net.max_len:
        raise ValueError(f"expected sequences of length {net.max_len}, got shape {ids.shape}")
    labels = []
    minimum = net.window if net.arch == "cnn" else 1
    for s in range(0, len(ids), batch_size):
        lb = lengths[s:s + batch_size]
        scores, _ = forward(net, _trim(ids[s:s + batch_size], lb, minimum), lb)
        if net.binary:
            # sigma(z) >= 0.5 exactly when z >= 0
            labels.extend(net.classes[1] if z >= 0 else net.classes[0] for z in scores[:, 0])
        else:
            labels.extend(net.classes[i] for i in np.argmax(scores, axis=1))
    return labels


def neural_predict(net: Network, seq) -> tuple:
    """Label and probability vector for one :class:`~offenseval.features.EncodedSequence`."""
    ids = np.asarray(seq.indices)[None]
    lengths = np.array([seq.true_length])
    return predict_labels(net, ids, lengths)[0], predict_proba(net, ids, lengths)[0]


def _evaluate_split(net, ids, lengths, y, batch_size=256):
    total, n = 0.0, len(ids)
    minimum = net.window if net.arch == "cnn" else 1
    preds = []
    for s in range(0, n, batch_size):
        lb = lengths[s:s + batch_size]
        scores, _ = forward(net, _trim(ids[s:s + batch_size], lb, minimum), lb)
        loss, _ = batch_loss(net, scores, y[s:s + batch_size])
        total += loss * len(lb)
        if net.binary:
            preds.extend((scores[:, 0] >= 0).astype(int))
        else:
            preds.extend(np.argmax(scores, axis=1))
    report = evaluate(list(y), preds, range(len(net.classes)))
    return total / n, report.accuracy, report.macro_f1


def train_model(arch: str, train, val, cfg: TrainConfig, classes, max_len: Optional[int] = None,
                n_rows: Optional[int] = None):
    """Mini-batch training with per-epoch validation and early stopping.

    Args:
        arch: ``lstm``, ``bilstm`` or ``cnn``.
        train: ``(ids, lengths, y)`` with ``y`` as class indices into ``classes``.
        val: Same layout; drives early stopping and the returned weights.
        cfg: Hyperparameters.
        classes: Ordered label names. Two classes train a single-logit head.
        max_len: Sequence length the model accepts; defaults to ``ids.shape[1]``.
        n_rows: Embedding table rows; defaults to ``max(ids) + 1``.

    Returns:
        ``(network, history)``. The network carries the parameters of the
        epoch with the lowest validation loss.
    """
    tr_ids, tr_len, tr_y = (np.asarray(a) for a in train)
    va_ids, va_len, va_y = (np.asarray(a) for a in val)
    if len(tr_ids) == 0 or len(va_ids) == 0:
        raise ValueError("training and validation splits must be nonempty")
    tr_len = tr_len.astype(np.int64)
    va_len = va_len.astype(np.int64)
    max_len = tr_ids.shape[1] if max_len is None else max_len
    if n_rows is None:
        n_rows = int(max(tr_ids.max(), va_ids.max())) + 1
    rng = np.random.default_rng(cfg.seed)
    net = init_network(arch, n_rows, classes, max_len, cfg, rng)
    frozen = {"embedding": [0]}
    adam = AdamState(cfg.beta1, cfg.beta2, cfg.eps)
    history = TrainHistory()
    stopper = EarlyStopping(cfg.patience)
    best_params = copy.deepcopy(net.params)
    minimum = net.window if arch == "cnn" else 1
    n = len(tr_ids)
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        running = 0.0
        for s in range(0, n, cfg.batch_size):
            idx = order[s:s + cfg.batch_size]
            lb = tr_len[idx]
            scores, cache = forward(net, _trim(tr_ids[idx], lb, minimum), lb,
                                    train=True, dropout_p=cfg.dropout_p, rng=rng)
            loss, d_scores = batch_loss(net, scores, tr_y[idx])
            if not math.isfinite(loss):
                raise FloatingPointError(
                    f"non-finite training loss at epoch {epoch}, batch {s // cfg.batch_size}")
            running += loss * len(idx)
            grads = backward(net, cache, d_scores)
            if cfg.optimizer == "adam":
                adam_step(adam, net.params, grads, cfg.learning_rate, cfg.l2_lambda, frozen)
            else:
                sgd_step(net.params, grads, cfg.learning_rate, cfg.l2_lambda, frozen)
        val_loss, val_acc, val_f1 = _evaluate_split(net, va_ids, va_len, va_y)
        if not math.isfinite(val_loss):
            raise FloatingPointError(f"non-finite validation loss at epoch {epoch}")
        history.train_loss.append(running / n)
        history.val_loss.append(val_loss)
        history.val_acc.append(val_acc)
        history.val_macro_f1.append(val_f1)
        log.info("epoch %d train_loss=%.4f val_loss=%.4f val_acc=%.4f val_f1=%.4f",
                 epoch, running / n, val_loss, val_acc, val_f1)
        improved, stop = stopper.update(epoch, val_loss)
        if improved:
            best_params = copy.deepcopy(net.params)
        if stop:
            break
    history.best_epoch = stopper.best_epoch
    net.params = best_params
    return net, history
