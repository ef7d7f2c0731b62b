"""Dense 2-D tensors with a reverse-mode differentiation tape.

Every op records its output together with its input references and a
backward rule ``g -> (grad_parent_0, grad_parent_1, ...)``.  Calling
:func:`backward` on a 1x1 loss orders the recorded nodes topologically
(the :class:`Tape`) and visits each exactly once.

Precision is a process-wide setting: ``f32`` for training, ``f64`` for
gradient checks and oracles.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from typing import Any

import numpy as np

from hetgt.core.errors import ContractError, NumericalError

_log = logging.getLogger(__name__)

BackwardRule = Callable[[np.ndarray], Sequence["np.ndarray | None"]]


# ---------------------------------------------------------------------------
# Precision
# ---------------------------------------------------------------------------
PRECISIONS: dict[str, type[np.floating[Any]]] = {"f32": np.float32, "f64": np.float64}

_dtype: type[np.floating[Any]] = np.float32


def get_dtype() -> type[np.floating[Any]]:
    """Return the numpy dtype new tensors are created with."""
    return _dtype


def get_precision() -> str:
    return "f64" if _dtype is np.float64 else "f32"


def set_precision(name: str) -> None:
    """Switch the working precision (``"f32"`` or ``"f64"``)."""
    global _dtype
    try:
        _dtype = PRECISIONS[name]
    except KeyError:
        raise ContractError(f"Unknown precision {name!r}; expected one of {sorted(PRECISIONS)}") from None


@contextmanager
def precision(name: str) -> Iterator[None]:
    """Temporarily switch the working precision."""
    previous = get_precision()
    set_precision(name)
    try:
        yield
    finally:
        set_precision(previous)


# ---------------------------------------------------------------------------
# Backward fault injection (gradcheck detector sanity)
# ---------------------------------------------------------------------------
_backward_faults: dict[str, float] = {}


@contextmanager
def inject_backward_fault(op: str, scale: float) -> Iterator[None]:
    """Scale every gradient produced by *op*'s backward rule by *scale*."""
    _backward_faults[op] = scale
    _log.warning("Backward fault injected: op=%s scale=%g", op, scale)
    try:
        yield
    finally:
        _backward_faults.pop(op, None)


# ---------------------------------------------------------------------------
# Tensor
# ---------------------------------------------------------------------------
def _check_finite(data: np.ndarray, op: str) -> None:
    if not np.isfinite(data).all():
        raise NumericalError("Non-finite value produced", op=op)


class Tensor:
    """A rows x cols real matrix that can take part in differentiation.

    Args:
        data: Anything ``numpy.asarray`` accepts; must be 2-D (scalars and
            1-D inputs are rejected so shapes stay explicit).
        requires_grad: Whether gradients should be accumulated into
            :attr:`grad` by :func:`backward`.
        name: Optional label used in diagnostics and checkpoints.
    """

    __slots__ = ("_backward", "_parents", "data", "grad", "name", "op", "requires_grad")

    def __init__(self, data: Any, requires_grad: bool = False, *, name: str | None = None) -> None:
        arr = np.array(data, dtype=get_dtype(), copy=True)
        if arr.ndim != 2:
            raise ContractError(f"Tensor data must be 2-D, got shape {arr.shape}")
        _check_finite(arr, "leaf")
        self.data: np.ndarray = arr
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.name = name
        self.op = "leaf"
        self._parents: tuple[Tensor, ...] = ()
        self._backward: BackwardRule | None = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_op(
        cls,
        data: np.ndarray,
        op: str,
        parents: Sequence[Tensor],
        backward: BackwardRule,
    ) -> Tensor:
        """Wrap an op result, recording it on the tape if any parent needs grads."""
        _check_finite(data, op)
        out = cls.__new__(cls)
        out.data = data
        out.grad = None
        out.name = None
        out.op = op
        out.requires_grad = any(p.requires_grad for p in parents)
        if out.requires_grad:
            out._parents = tuple(parents)
            out._backward = backward
        else:
            out._parents = ()
            out._backward = None
        return out

    @classmethod
    def zeros(cls, rows: int, cols: int, requires_grad: bool = False) -> Tensor:
        return cls(np.zeros((rows, cols)), requires_grad=requires_grad)

    # -- shape -----------------------------------------------------------------

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_leaf(self) -> bool:
        return self._backward is None

    def item(self) -> float:
        if self.shape != (1, 1):
            raise ContractError(f"item() needs a 1x1 tensor, got {self.shape}")
        return float(self.data[0, 0])

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def zero_grad(self) -> None:
        self.grad = None

    def grad_or_zeros(self) -> np.ndarray:
        """Return :attr:`grad`, or zeros when no gradient reached this tensor."""
        return np.zeros_like(self.data) if self.grad is None else self.grad

    def detach(self) -> Tensor:
        return Tensor(self.data, requires_grad=False, name=self.name)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, op={self.op!r}{label}, requires_grad={self.requires_grad})"

    # -- operator sugar (implemented in ops) -----------------------------------

    def __matmul__(self, other: Tensor) -> Tensor:
        from hetgt.tensor.ops import matmul

        return matmul(self, other)

    def __add__(self, other: Tensor) -> Tensor:
        from hetgt.tensor.ops import add

        return add(self, other)

    def __mul__(self, other: Tensor | np.ndarray | float) -> Tensor:
        from hetgt.tensor.ops import mul

        return mul(self, other)


# ---------------------------------------------------------------------------
# Tape
# ---------------------------------------------------------------------------
class Tape:
    """Topologically ordered op nodes reachable from a root tensor.

    Every node's inputs precede it in :attr:`nodes`.
    """

    def __init__(self, nodes: list[Tensor]) -> None:
        self.nodes = nodes

    @classmethod
    def record(cls, root: Tensor) -> Tape:
        """Collect the nodes reachable from *root* in dependency order."""
        order: list[Tensor] = []
        visited: set[int] = set()
        # Iterative post-order DFS; deep models exceed the recursion limit.
        stack: list[tuple[Tensor, bool]] = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in reversed(node._parents):
                if id(parent) not in visited:
                    stack.append((parent, False))
        return cls(order)

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[Tensor]:
        return iter(self.nodes)

    def consumers(self, tensor: Tensor) -> list[Tensor]:
        """Return the recorded nodes that take *tensor* as a direct input."""
        return [n for n in self.nodes if any(p is tensor for p in n._parents)]

    def run_backward(self, root: Tensor) -> None:
        """Propagate ``d root / d node`` into every node requiring gradients."""
        for node in self.nodes:
            if not node.is_leaf:
                node.grad = None
        root.grad = np.ones_like(root.data)

        for node in reversed(self.nodes):
            if node.is_leaf or node.grad is None:
                continue
            assert node._backward is not None
            parent_grads = node._backward(node.grad)
            scale = _backward_faults.get(node.op)
            for parent, pg in zip(node._parents, parent_grads, strict=True):
                if pg is None or not parent.requires_grad:
                    continue
                if scale is not None:
                    pg = pg * scale
                if not np.isfinite(pg).all():
                    raise NumericalError("Non-finite gradient", op=node.op)
                if pg.shape != parent.data.shape:
                    raise ContractError(
                        f"Backward rule of {node.op!r} returned shape {pg.shape} "
                        f"for input of shape {parent.data.shape}"
                    )
                if parent.grad is None:
                    parent.grad = np.array(pg, dtype=parent.data.dtype, copy=True)
                else:
                    parent.grad += pg


def backward(loss: Tensor) -> Tape:
    """Accumulate ``d loss / d t`` into ``t.grad`` for every reachable tensor.

    Leaf gradients accumulate across calls (call ``zero_grad`` between
    steps); intermediate gradients are recomputed each call.

    Returns:
        The :class:`Tape` that was traversed.

    Raises:
        ContractError: If *loss* is not 1x1.
    """
    if loss.shape != (1, 1):
        raise ContractError(f"backward() needs a 1x1 loss, got shape {loss.shape}")
    tape = Tape.record(loss)
    tape.run_backward(loss)
    return tape
