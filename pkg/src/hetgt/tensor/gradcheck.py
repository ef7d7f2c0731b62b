"""Central finite-difference gradient checking."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable

import numpy as np

from hetgt.core.errors import ContractError
from hetgt.tensor.tensor import Tensor, backward, get_precision

_log = logging.getLogger(__name__)


def relative_error(analytic: float, numeric: float) -> float:
    """``|a - n| / max(1, |a|, |n|)``."""
    return abs(analytic - numeric) / max(1.0, abs(analytic), abs(numeric))


def grad_check(
    f: Callable[[], Tensor],
    params: Iterable[Tensor],
    eps: float = 1e-5,
    max_coords: int | None = 64,
    seed: int = 0,
) -> float:
    """Compare analytic gradients of *f* against central differences.

    Args:
        f: Deterministic zero-argument callable building a 1x1 loss from
            *params* (dropout disabled).
        params: Tensors to check; each must have ``requires_grad``.
        eps: Finite-difference step.
        max_coords: Coordinates sampled per tensor (``None`` checks all).
        seed: Seed for the coordinate sample.

    Returns:
        The maximum relative error over all checked coordinates.

    Raises:
        ContractError: If wide precision is not active.
        NumericalError: If any forward or backward value is non-finite
            (propagated from the offending op).
    """
    if get_precision() != "f64":
        raise ContractError("grad_check requires wide (f64) precision")
    tensors = list(params)
    for t in tensors:
        if not t.requires_grad:
            raise ContractError(f"grad_check parameter {t.name or t!r} does not require grad")
        t.zero_grad()

    loss = f()
    backward(loss)
    analytic = [t.grad_or_zeros().copy() for t in tensors]

    rng = np.random.default_rng(seed)
    worst = 0.0
    for t, grad in zip(tensors, analytic, strict=True):
        flat = t.data.reshape(-1)
        n = flat.shape[0]
        coords = np.arange(n) if max_coords is None or n <= max_coords else rng.choice(n, max_coords, replace=False)
        for i in coords:
            original = flat[i]
            flat[i] = original + eps
            plus = f().item()
            flat[i] = original - eps
            minus = f().item()
            flat[i] = original
            numeric = (plus - minus) / (2 * eps)
            err = relative_error(float(grad.reshape(-1)[i]), numeric)
            worst = max(worst, err)
    _log.debug("grad_check: %d tensors, max relative error %.3e", len(tensors), worst)
    return worst
