"""Dense differentiable ops on :class:`~hetgt.tensor.tensor.Tensor`.

All ops take and return 2-D tensors.  Elementwise binary ops broadcast a
1x1, 1xn or nx1 right operand; the backward rule sums the gradient back
to the operand's shape.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Literal

import numpy as np

from hetgt.core.errors import ConfigError, ContractError, DimensionError
from hetgt.tensor.tensor import Tensor, get_dtype

ActivationKind = Literal["leaky_relu", "elu", "tanh", "relu", "sigmoid", "identity"]
ACTIVATIONS: tuple[str, ...] = ("leaky_relu", "elu", "tanh", "relu", "sigmoid", "identity")

DEFAULT_LEAKY_SLOPE = 0.01


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------
def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum *grad* down to *shape* along broadcast axes."""
    if grad.shape == shape:
        return grad
    out = grad
    for axis, (g_dim, s_dim) in enumerate(zip(grad.shape, shape, strict=True)):
        if s_dim == 1 and g_dim != 1:
            out = out.sum(axis=axis, keepdims=True)
    return out


def _check_broadcast(a: Tensor, b_shape: tuple[int, ...], op: str) -> None:
    for a_dim, b_dim in zip(a.shape, b_shape, strict=True):
        if b_dim not in (1, a_dim):
            raise DimensionError(f"{op}: cannot broadcast {b_shape} onto {a.shape}")


def constant(data: np.ndarray | float) -> np.ndarray:
    """Return *data* as a 2-D array in the working precision."""
    arr = np.asarray(data, dtype=get_dtype())
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    return arr


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------
def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product ``a @ b``.

    Raises:
        DimensionError: If ``a.cols != b.rows``.
    """
    if a.cols != b.rows:
        raise DimensionError(f"matmul: {a.shape} @ {b.shape}")
    out = a.data @ b.data

    def _backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return g @ b.data.T, a.data.T @ g

    return Tensor.from_op(out, "matmul", (a, b), _backward)


def add(a: Tensor, b: Tensor) -> Tensor:
    _check_broadcast(a, b.shape, "add")
    out = a.data + b.data

    def _backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return g, _unbroadcast(g, b.shape)

    return Tensor.from_op(out, "add", (a, b), _backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    _check_broadcast(a, b.shape, "sub")
    out = a.data - b.data

    def _backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return g, -_unbroadcast(g, b.shape)

    return Tensor.from_op(out, "sub", (a, b), _backward)


def mul(a: Tensor, b: Tensor | np.ndarray | float) -> Tensor:
    """Elementwise product; *b* may be a tensor or a constant array/scalar."""
    if isinstance(b, Tensor):
        _check_broadcast(a, b.shape, "mul")
        b_data = b.data
        out = a.data * b_data

        def _backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return _unbroadcast(g * b_data, a.shape), _unbroadcast(g * a.data, b.shape)

        return Tensor.from_op(out, "mul", (a, b), _backward)

    c = constant(b)
    _check_broadcast(a, c.shape, "mul")
    out = a.data * c

    def _backward_const(g: np.ndarray) -> tuple[np.ndarray]:
        return (_unbroadcast(g * c, a.shape),)

    return Tensor.from_op(out, "mul", (a,), _backward_const)


def sum_all(x: Tensor) -> Tensor:
    """Sum of every entry, as a 1x1 tensor."""
    out = constant(x.data.sum())

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (np.broadcast_to(g, x.shape).copy(),)

    return Tensor.from_op(out, "sum_all", (x,), _backward)


def mean_rows(x: Tensor) -> Tensor:
    """Column-wise mean over rows (``1 x cols``)."""
    if x.rows == 0:
        raise ContractError("mean_rows of an empty tensor")
    n = x.rows
    out = x.data.mean(axis=0, keepdims=True)

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (np.broadcast_to(g / n, x.shape).copy(),)

    return Tensor.from_op(out, "mean_rows", (x,), _backward)


# ---------------------------------------------------------------------------
# Row indexing
# ---------------------------------------------------------------------------
def slice_rows(x: Tensor, start: int, stop: int) -> Tensor:
    if not 0 <= start <= stop <= x.rows:
        raise DimensionError(f"slice_rows[{start}:{stop}] out of range for {x.rows} rows")
    out = x.data[start:stop]

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros_like(x.data)
        full[start:stop] = g
        return (full,)

    return Tensor.from_op(out.copy(), "slice_rows", (x,), _backward)


def gather_rows(x: Tensor, index: np.ndarray) -> Tensor:
    """Select rows ``x[index]``; repeated indices accumulate in backward."""
    idx = np.asarray(index, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= x.rows):
        raise DimensionError(f"gather_rows index out of range for {x.rows} rows")
    out = x.data[idx]

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros_like(x.data)
        np.add.at(full, idx, g)
        return (full,)

    return Tensor.from_op(out, "gather_rows", (x,), _backward)


def scatter_rows(x: Tensor, index: np.ndarray, n_rows: int) -> Tensor:
    """Place row ``i`` of *x* at row ``index[i]`` of an ``n_rows``-row zero matrix.

    Indices must be unique.
    """
    idx = np.asarray(index, dtype=np.int64)
    if idx.shape[0] != x.rows:
        raise DimensionError(f"scatter_rows: {idx.shape[0]} indices for {x.rows} rows")
    out = np.zeros((n_rows, x.cols), dtype=x.data.dtype)
    out[idx] = x.data

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g[idx],)

    return Tensor.from_op(out, "scatter_rows", (x,), _backward)


def concat_rows(parts: Sequence[Tensor]) -> Tensor:
    """Stack tensors vertically; all must share a column count."""
    if not parts:
        raise ContractError("concat_rows needs at least one tensor")
    cols = parts[0].cols
    if any(p.cols != cols for p in parts):
        raise DimensionError("concat_rows: column counts differ")
    bounds = np.cumsum([0, *(p.rows for p in parts)])
    out = np.concatenate([p.data for p in parts], axis=0)

    def _backward(g: np.ndarray) -> tuple[np.ndarray, ...]:
        return tuple(g[bounds[i] : bounds[i + 1]] for i in range(len(parts)))

    return Tensor.from_op(out, "concat_rows", tuple(parts), _backward)


# ---------------------------------------------------------------------------
# Nonlinearities
# ---------------------------------------------------------------------------
def activation(x: Tensor, kind: str, slope: float = DEFAULT_LEAKY_SLOPE) -> Tensor:
    """Apply an elementwise nonlinearity.

    Raises:
        ConfigError: For an unknown *kind*.
    """
    d = x.data
    if kind == "identity":
        return x
    if kind == "leaky_relu":
        pos = d > 0
        out = np.where(pos, d, slope * d)

        def _backward(g: np.ndarray) -> tuple[np.ndarray]:
            return (np.where(pos, g, slope * g),)

    elif kind == "elu":
        pos = d > 0
        neg = np.expm1(np.minimum(d, 0))
        out = np.where(pos, d, neg)

        def _backward(g: np.ndarray) -> tuple[np.ndarray]:
            return (np.where(pos, g, g * (neg + 1)),)

    elif kind == "tanh":
        out = np.tanh(d)

        def _backward(g: np.ndarray) -> tuple[np.ndarray]:
            return (g * (1 - out * out),)

    elif kind == "relu":
        pos = d > 0
        out = np.where(pos, d, 0).astype(d.dtype)

        def _backward(g: np.ndarray) -> tuple[np.ndarray]:
            return (np.where(pos, g, 0).astype(g.dtype),)

    elif kind == "sigmoid":
        out = 0.5 * (1 + np.tanh(0.5 * d))

        def _backward(g: np.ndarray) -> tuple[np.ndarray]:
            return (g * out * (1 - out),)

    else:
        raise ConfigError(f"Unknown activation {kind!r}; expected one of {ACTIVATIONS}")

    return Tensor.from_op(out.astype(d.dtype, copy=False), kind, (x,), _backward)


def dropout(x: Tensor, p: float, rng: np.random.Generator | None, training: bool) -> Tensor:
    """Inverted dropout: scale kept entries by ``1/(1-p)`` while training.

    Identity (the same tensor) in eval mode or when ``p == 0``.
    """
    if not 0 <= p < 1:
        raise ContractError(f"dropout rate must lie in [0, 1), got {p}")
    if not training or p == 0:
        return x
    if rng is None:
        raise ContractError("dropout in training mode needs an rng")
    mask = (rng.random(x.shape) >= p).astype(x.data.dtype) / x.data.dtype.type(1 - p)
    out = x.data * mask

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g * mask,)

    return Tensor.from_op(out, "dropout", (x,), _backward)


# ---------------------------------------------------------------------------
# Loss kernel
# ---------------------------------------------------------------------------
def softmax_cross_entropy(logits: Tensor, labels: np.ndarray, index: np.ndarray) -> Tensor:
    """Mean negative log-likelihood of ``labels[index]`` under row-softmax.

    Stabilised with log-sum-exp.  Returns a 1x1 tensor.
    """
    idx = np.asarray(index, dtype=np.int64)
    if idx.size == 0:
        raise ContractError("cross entropy over an empty index mask")
    y = np.asarray(labels, dtype=np.int64)[idx]
    z = logits.data[idx]
    shifted = z - z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_norm
    n = idx.size
    loss = -log_probs[np.arange(n), y].sum() / n
    out = constant(loss)

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        probs = np.exp(log_probs)
        probs[np.arange(n), y] -= 1
        full = np.zeros_like(logits.data)
        np.add.at(full, idx, probs * (g[0, 0] / n))
        return (full,)

    return Tensor.from_op(out, "cross_entropy", (logits,), _backward)
