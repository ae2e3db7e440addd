"""Forward and backward passes for the fixed layer set.

All functions work on batches: token ids ``(B, T)``, activations
``(B, T, D)``, lengths ``(B,)``. Backward functions take the cache returned
by the matching forward call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels


@dataclass
class LstmParams:
    """Stacked gate weights, gate order input, forget, output, candidate."""

    W: np.ndarray  # (4H, D)
    U: np.ndarray  # (4H, H)
    b: np.ndarray  # (4H,)

    GATES = ("input", "forget", "output", "candidate")

    @property
    def hidden(self) -> int:
        return self.U.shape[1]

    def gate(self, name: str):
        """``(W_g, U_g, b_g)`` views for one gate."""
        k, H = self.GATES.index(name), self.hidden
        s = slice(k * H, (k + 1) * H)
        return self.W[s], self.U[s], self.b[s]


@dataclass
class ConvParams:
    W: np.ndarray  # (n_filters, window * emb_dim)
    b: np.ndarray  # (n_filters,)
    window: int = 3


def embed_forward(ids, table):
    ids = np.asarray(ids)
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise IndexError(f"token index out of range for a table of {table.shape[0]} rows")
    return table[ids]


def embed_backward(ids, d_out, n_rows):
    """Scatter-add into a table gradient; the PAD row gets no gradient."""
    ids = np.asarray(ids)
    E = d_out.shape[-1]
    grad = np.zeros((n_rows, E), dtype=d_out.dtype)
    np.add.at(grad, ids.ravel(), d_out.reshape(-1, E))
    grad[0] = 0
    return grad


def lstm_forward(x, p: LstmParams, lengths):
    """Run an LSTM from a zero state and read the hidden state at each row's length.

    Args:
        x: ``(B, T, D)`` inputs, or ``(T, D)`` for a single sequence.
        p: Parameters.
        lengths: ``(B,)`` true lengths, or an int for a single sequence.
            Positions at or past the length are never processed.

    Returns:
        ``(h_last, cache)`` with ``h_last`` of shape ``(B, H)`` (``(H,)`` for
        a single sequence).
    """
    single = np.ndim(x) == 2
    if single:
        x = x[None]
        lengths = [lengths]
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    B, T, D = x.shape
    if p.W.shape[1] != D:
        raise ValueError(f"input dim {D} does not match LSTM input dim {p.W.shape[1]}")
    if lengths.size and (lengths.max() > T or lengths.min() < 0):
        raise ValueError("true length outside [0, T]")
    x = np.ascontiguousarray(x, dtype=p.W.dtype)
    xw = np.ascontiguousarray(x @ p.W.T + p.b)
    acts, cs, hs = _kernels.lstm_forward_steps(xw, lengths, np.ascontiguousarray(p.U))
    h_last = hs[np.arange(B), lengths]
    cache = (x, lengths, p, acts, cs, hs, single)
    return (h_last[0] if single else h_last), cache


def lstm_backward(dh_last, cache):
    """Returns ``(dx, LstmParams-shaped gradient)``."""
    x, lengths, p, acts, cs, hs, single = cache
    dh_last = np.asarray(dh_last, dtype=p.W.dtype)
    if single:
        dh_last = dh_last[None]
    dz, dU = _kernels.lstm_backward_steps(acts, cs, hs, lengths, np.ascontiguousarray(p.U),
                                          np.ascontiguousarray(dh_last))
    B, T, G = dz.shape
    D = x.shape[2]
    flat = dz.reshape(-1, G)
    dW = flat.T @ x.reshape(-1, D)
    db = flat.sum(axis=0)
    dx = dz @ p.W
    return (dx[0] if single else dx), LstmParams(dW, dU, db)


def _reverse_index(lengths, T):
    t = np.arange(T)[None, :]
    L = lengths[:, None]
    return np.where(t < L, L - 1 - t, t)


def bilstm_forward(x, p_fwd: LstmParams, p_bwd: LstmParams, lengths):
    """Concatenate the final states of a left-to-right and a right-to-left LSTM.

    The backward LSTM reads only the reversed unpadded prefix.
    """
    single = np.ndim(x) == 2
    if single:
        x = x[None]
        lengths = [lengths]
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    B, T, _ = x.shape
    rev = _reverse_index(lengths, T)
    rows = np.arange(B)[:, None]
    h_f, cache_f = lstm_forward(x, p_fwd, lengths)
    h_b, cache_b = lstm_forward(x[rows, rev], p_bwd, lengths)
    h = np.concatenate([h_f, h_b], axis=1)
    cache = (cache_f, cache_b, rev, single)
    return (h[0] if single else h), cache


def bilstm_backward(dh, cache):
    """Returns ``(dx, grad_fwd, grad_bwd)``."""
    cache_f, cache_b, rev, single = cache
    dh = np.asarray(dh)
    if single:
        dh = dh[None]
    H = dh.shape[1] // 2
    dx_f, g_f = lstm_backward(dh[:, :H], cache_f)
    dx_rev, g_b = lstm_backward(dh[:, H:], cache_b)
    dx = dx_f.copy()
    rows = np.arange(dx.shape[0])[:, None]
    dx[rows, rev] += dx_rev
    return (dx[0] if single else dx), g_f, g_b


def conv_pool_forward(x, p: ConvParams, lengths=None):
    """Valid 1-D convolution over time, ReLU, then max over positions.

    Positions are restricted to windows inside the first
    ``max(length, window)`` steps, and inputs at or past ``length`` are
    zeroed, so padding never influences the result.

    Returns:
        ``(pooled, cache)``; ``pooled`` is ``(B, n_filters)``.
    """
    single = np.ndim(x) == 2
    if single:
        x = x[None]
        lengths = None if lengths is None else [lengths]
    B, T, E = x.shape
    k = p.window
    if T < k:
        raise ValueError(f"sequence length {T} shorter than window {k}")
    if p.W.shape[1] != k * E:
        raise ValueError(f"filter width {p.W.shape[1]} != window * emb_dim = {k * E}")
    lengths = np.full(B, T, dtype=np.int64) if lengths is None else np.asarray(lengths, np.int64)
    keep = (np.arange(T)[None, :] < lengths[:, None])
    xm = x * keep[..., None]
    P = T - k + 1
    cols = np.concatenate([xm[:, j:j + P] for j in range(k)], axis=2)  # (B, P, kE)
    s = cols @ p.W.T + p.b
    a = np.maximum(s, 0)
    n_valid = np.maximum(lengths - k + 1, 1)
    valid = np.arange(P)[None, :] < n_valid[:, None]
    masked = np.where(valid[..., None], a, -np.inf)
    arg = np.argmax(masked, axis=1)  # (B, F)
    pooled = np.take_along_axis(a, arg[:, None, :], axis=1)[:, 0, :]
    cache = (cols, s, arg, keep, p, E, single)
    return (pooled[0] if single else pooled), cache


def conv_pool_backward(d_out, cache):
    """Returns ``(dx, ConvParams-shaped gradient)``; gradient flows only through each argmax."""
    cols, s, arg, keep, p, E, single = cache
    d_out = np.asarray(d_out, dtype=s.dtype)
    if single:
        d_out = d_out[None]
    B, P, F = s.shape
    k = p.window
    ds = np.zeros_like(s)
    np.put_along_axis(ds, arg[:, None, :], d_out[:, None, :], axis=1)
    ds *= s > 0
    dW = ds.reshape(-1, F).T @ cols.reshape(-1, k * E)
    db = ds.sum(axis=(0, 1))
    dcols = ds @ p.W
    T = P + k - 1
    dx = np.zeros((B, T, E), dtype=s.dtype)
    for j in range(k):
        dx[:, j:j + P] += dcols[:, :, j * E:(j + 1) * E]
    dx *= keep[..., None]
    return (dx[0] if single else dx), ConvParams(dW, db, k)


def dense_forward(h, W, b):
    h = np.asarray(h)
    if h.shape[-1] != W.shape[1]:
        raise ValueError(f"input dim {h.shape[-1]} does not match dense input dim {W.shape[1]}")
    return h @ W.T + b


def dense_backward(d_out, h, W):
    """Returns ``(dh, dW, db)``."""
    d_out = np.atleast_2d(d_out)
    h2 = np.atleast_2d(h)
    dW = d_out.T @ h2
    db = d_out.sum(axis=0)
    dh = d_out @ W
    return (dh[0] if np.ndim(h) == 1 else dh), dW, db


def dropout_apply(h, p: float, train: bool, rng=None):
    """Inverted dropout.

    Args:
        h: Activations.
        p: Drop probability in ``[0, 1)``.
        train: Eval mode (``False``) is the identity.
        rng: ``numpy.random.Generator`` or an integer seed.

    Returns:
        ``(out, mask)`` where ``mask`` already carries the ``1 / (1 - p)``
        scale (``None`` when nothing was dropped).
    """
    if not 0 <= p < 1:
        raise ValueError(f"dropout probability must lie in [0, 1), got {p}")
    if not train or p == 0:
        return h, None
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    keep = rng.random(np.shape(h)) >= p
    mask = keep.astype(np.asarray(h).dtype) / np.asarray(1 - p, dtype=np.asarray(h).dtype)
    return h * mask, mask
