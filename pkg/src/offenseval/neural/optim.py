"""SGD and Adam over named parameter arrays, with L2 folded into the gradient.

``frozen`` maps a parameter name to row indices that must never change
(the PAD embedding row).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _effective_grad(name, p, g, l2_lambda, frozen):
    if p.shape != g.shape:
        raise ValueError(f"{name}: shape mismatch {p.shape} vs {g.shape}")
    g = g + l2_lambda * p if l2_lambda else g.copy()
    if frozen and name in frozen:
        g[frozen[name]] = 0
    return g


def sgd_step(params: dict, grads: dict, lr: float, l2_lambda: float = 0.0, frozen=None) -> None:
    """``p <- p - lr * (g + l2_lambda * p)``, in place."""
    for name, p in params.items():
        g = _effective_grad(name, p, grads[name], l2_lambda, frozen)
        p -= np.asarray(lr, dtype=p.dtype) * g


@dataclass
class AdamState:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(state: AdamState, params: dict, grads: dict, lr: float,
              l2_lambda: float = 0.0, frozen=None) -> None:
    """One bias-corrected Adam update, in place on ``params`` and ``state``."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1 - b1 ** state.t
    c2 = 1 - b2 ** state.t
    for name, p in params.items():
        g = _effective_grad(name, p, grads[name], l2_lambda, frozen)
        m = state.m.setdefault(name, np.zeros_like(p))
        v = state.v.setdefault(name, np.zeros_like(p))
        m *= b1
        m += (1 - b1) * g
        v *= b2
        v += (1 - b2) * g * g
        p -= (lr * (m / c1) / (np.sqrt(v / c2) + state.eps)).astype(p.dtype)
