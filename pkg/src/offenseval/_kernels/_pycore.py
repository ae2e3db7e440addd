"""Pure numpy/Python versions of the compiled kernels in ``_core.pyx``.

Signatures and in-place semantics match the compiled module exactly.
"""

import numpy as np
from scipy.special import expit


def lstm_forward_steps(xw, lengths, U):
    """Run the LSTM recurrence over precomputed input projections.

    Args:
        xw: ``(B, T, 4H)`` input projections ``x W^T + b``, gate order i, f, o, g.
        lengths: ``(B,)`` int64 true lengths.
        U: ``(4H, H)`` recurrent weights.

    Returns:
        ``(acts, cs, hs)``: gate activations ``(B, T, 4H)`` and cell/hidden
        states ``(B, T+1, H)`` where index ``t+1`` is the state after step
        ``t``. Rows past their length carry their last state forward and
        have zero activations.
    """
    B, T, G = xw.shape
    H = G // 4
    acts = np.zeros_like(xw)
    cs = np.zeros((B, T + 1, H), dtype=xw.dtype)
    hs = np.zeros((B, T + 1, H), dtype=xw.dtype)
    tmax = int(lengths.max()) if B else 0
    for t in range(tmax):
        active = (lengths > t)[:, None]
        z = xw[:, t] + hs[:, t] @ U.T
        sig = expit(z[:, :3 * H])
        g = np.tanh(z[:, 3 * H:])
        i, f, o = sig[:, :H], sig[:, H:2 * H], sig[:, 2 * H:]
        c = f * cs[:, t] + i * g
        h = o * np.tanh(c)
        acts[:, t, :3 * H] = np.where(active, sig, 0)
        acts[:, t, 3 * H:] = np.where(active, g, 0)
        cs[:, t + 1] = np.where(active, c, cs[:, t])
        hs[:, t + 1] = np.where(active, h, hs[:, t])
    if tmax < T:
        cs[:, tmax + 1:] = cs[:, tmax:tmax + 1]
        hs[:, tmax + 1:] = hs[:, tmax:tmax + 1]
    return acts, cs, hs


def lstm_backward_steps(acts, cs, hs, lengths, U, dh_last):
    """Backpropagate a gradient on the final hidden state through time.

    Returns:
        ``(dz, dU)``: gradients w.r.t. the pre-activations ``(B, T, 4H)`` and
        the recurrent weights.
    """
    B, T, G = acts.shape
    H = G // 4
    dz = np.zeros_like(acts)
    dU = np.zeros_like(U)
    dh = np.array(dh_last, dtype=acts.dtype, copy=True)
    dc = np.zeros_like(dh)
    tmax = int(lengths.max()) if B else 0
    for t in range(tmax - 1, -1, -1):
        active = (lengths > t)[:, None]
        a = acts[:, t]
        i, f, o, g = a[:, :H], a[:, H:2 * H], a[:, 2 * H:3 * H], a[:, 3 * H:]
        tc = np.tanh(cs[:, t + 1])
        dct = dc + dh * o * (1 - tc * tc)
        d = np.concatenate([
            dct * g * i * (1 - i),
            dct * cs[:, t] * f * (1 - f),
            dh * tc * o * (1 - o),
            dct * i * (1 - g * g),
        ], axis=1)
        d = np.where(active, d, 0)
        dz[:, t] = d
        dU += d.T @ hs[:, t]
        dh = np.where(active, d @ U, dh)
        dc = np.where(active, dct * f, dc)
    return dz, dU


def hinge_sgd_epoch(indptr, indices, data, y, order, w, scale, b, lr, lam):
    """One pass of per-example SGD on the L2-regularized hinge loss.

    The weight vector is kept as ``scale * w`` so weight decay is O(1) per
    example; ``w`` is updated in place.

    Returns:
        ``(scale, b, hinge_sum)`` where ``hinge_sum`` is the summed hinge loss
        seen before each update.
    """
    decay = 1.0 - lr * lam
    hinge_sum = 0.0
    for k in order:
        lo, hi = indptr[k], indptr[k + 1]
        cols = indices[lo:hi]
        vals = data[lo:hi]
        dot = 0.0
        for j in range(hi - lo):
            dot += w[cols[j]] * vals[j]
        margin = y[k] * (scale * dot + b)
        scale *= decay
        if margin < 1.0:
            hinge_sum += 1.0 - margin
            step = lr * y[k] / scale
            for j in range(hi - lo):
                w[cols[j]] += step * vals[j]
            b += lr * y[k]
        if scale < 1e-9:
            w *= scale
            scale = 1.0
    return scale, b, hinge_sum
