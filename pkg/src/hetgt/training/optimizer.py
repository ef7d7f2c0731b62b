"""Adam with bias correction and L2 weight decay folded into the gradient."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hetgt.core.errors import ContractError
from hetgt.tensor.tensor import Tensor


@dataclass
class AdamState:
    """Per-parameter moments (zero-initialised lazily) and the shared step count."""

    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: dict[str, Tensor],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float,
    weight_decay: float = 0.0,
) -> AdamState:
    """One in-place Adam update of every tensor in *params*.

    ``g <- g + weight_decay * p`` precedes the moment updates.  Missing
    gradients count as zero.

    Returns:
        *state*, advanced by one step.
    """
    state.t += 1
    t = state.t
    b1, b2 = state.beta1, state.beta2
    correction1 = 1 - b1**t
    correction2 = 1 - b2**t
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p.data)
        elif g.shape != p.data.shape:
            raise ContractError(f"adam_step: gradient {g.shape} for parameter {name!r} of shape {p.data.shape}")
        if weight_decay:
            g = g + weight_decay * p.data
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None or v is None:
            m = np.zeros_like(p.data)
            v = np.zeros_like(p.data)
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        state.m[name] = m
        state.v[name] = v
        m_hat = m / correction1
        v_hat = v / correction2
        p.data -= (lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(p.data.dtype, copy=False)
    return state
