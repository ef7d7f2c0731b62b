"""Gradient-check targets: every differentiable op and every model kind."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from hetgt.core.models.config import MODEL_KINDS, DropoutConfig, ModelSpec
from hetgt.graph.fixtures import fixture_graph
from hetgt.nn.models import forward
from hetgt.nn.params import init_params
from hetgt.tensor import ops
from hetgt.tensor.gradcheck import grad_check
from hetgt.tensor.sparse import SegmentIndex, SparseAdjacency, segment_softmax, spmm, weighted_spmm
from hetgt.tensor.tensor import Tensor, precision
from hetgt.training.loss import cross_entropy_loss

_log = logging.getLogger(__name__)

GRADCHECK_TOLERANCE = 1e-4


@dataclass
class CheckTarget:
    name: str
    build: Callable[[], tuple[Callable[[], Tensor], list[Tensor]]]


@dataclass
class CheckOutcome:
    name: str
    max_error: float

    @property
    def passed(self) -> bool:
        return self.max_error < GRADCHECK_TOLERANCE


# ---------------------------------------------------------------------------
# Op targets
# ---------------------------------------------------------------------------
def _leaf(rng: np.random.Generator, rows: int, cols: int, name: str) -> Tensor:
    return Tensor(rng.normal(size=(rows, cols)), requires_grad=True, name=name)


def _unary(op: Callable[[Tensor], Tensor], rows: int = 4, cols: int = 3) -> Callable[[], tuple]:
    def build() -> tuple[Callable[[], Tensor], list[Tensor]]:
        rng = np.random.default_rng(11)
        x = _leaf(rng, rows, cols, "x")
        weights = rng.normal(size=op(x.detach()).shape)
        return (lambda: ops.sum_all(ops.mul(op(x), weights))), [x]

    return build


def _binary(
    op: Callable[[Tensor, Tensor], Tensor], a_shape: tuple[int, int], b_shape: tuple[int, int]
) -> Callable[[], tuple]:
    def build() -> tuple[Callable[[], Tensor], list[Tensor]]:
        rng = np.random.default_rng(12)
        a = _leaf(rng, *a_shape, "a")
        b = _leaf(rng, *b_shape, "b")
        weights = rng.normal(size=op(a.detach(), b.detach()).shape)
        return (lambda: ops.sum_all(ops.mul(op(a, b), weights))), [a, b]

    return build


def _small_adjacency() -> SparseAdjacency:
    rows = np.array([0, 0, 1, 2, 2, 2, 3])
    cols = np.array([0, 2, 1, 0, 1, 2, 3])
    values = np.array([0.5, 0.5, 1.0, 0.2, 0.3, 0.5, 1.0])
    return SparseAdjacency.from_coo(rows, cols, values, (4, 4))


def _spmm_target() -> tuple[Callable[[], Tensor], list[Tensor]]:
    rng = np.random.default_rng(13)
    adj = _small_adjacency()
    x = _leaf(rng, 4, 3, "x")
    weights = rng.normal(size=(4, 3))
    return (lambda: ops.sum_all(ops.mul(spmm(adj, x), weights))), [x]


def _weighted_spmm_target() -> tuple[Callable[[], Tensor], list[Tensor]]:
    rng = np.random.default_rng(14)
    adj = _small_adjacency()
    w = _leaf(rng, adj.nnz, 1, "w")
    x = _leaf(rng, 4, 3, "x")
    weights = rng.normal(size=(4, 3))
    return (lambda: ops.sum_all(ops.mul(weighted_spmm(adj.row_ptr, adj.col_idx, w, x), weights))), [w, x]


def _segment_softmax_target() -> tuple[Callable[[], Tensor], list[Tensor]]:
    rng = np.random.default_rng(15)
    seg = SegmentIndex.from_adjacency(_small_adjacency())
    s = _leaf(rng, seg.n_entries, 1, "scores")
    weights = rng.normal(size=(seg.n_entries, 1))
    return (lambda: ops.sum_all(ops.mul(segment_softmax(s, seg), weights))), [s]


def _dropout_target() -> tuple[Callable[[], Tensor], list[Tensor]]:
    rng = np.random.default_rng(16)
    x = _leaf(rng, 5, 3, "x")
    weights = rng.normal(size=(5, 3))
    # Fresh generator per call keeps the mask fixed across perturbations.
    return (
        lambda: ops.sum_all(ops.mul(ops.dropout(x, 0.4, np.random.default_rng(3), True), weights))
    ), [x]


def _cross_entropy_target() -> tuple[Callable[[], Tensor], list[Tensor]]:
    rng = np.random.default_rng(17)
    logits = _leaf(rng, 6, 3, "logits")
    labels = np.array([0, 2, 1, 1, 0, 2])
    index = np.array([0, 1, 3, 5])
    return (lambda: ops.softmax_cross_entropy(logits, labels, index)), [logits]


def op_targets() -> list[CheckTarget]:
    targets = [
        CheckTarget("op:matmul", _binary(ops.matmul, (4, 3), (3, 2))),
        CheckTarget("op:add", _binary(ops.add, (4, 3), (1, 3))),
        CheckTarget("op:sub", _binary(ops.sub, (4, 3), (4, 3))),
        CheckTarget("op:mul", _binary(ops.mul, (4, 3), (4, 1))),
        CheckTarget("op:sum_all", _unary(ops.sum_all)),
        CheckTarget("op:mean_rows", _unary(ops.mean_rows)),
        CheckTarget("op:slice_rows", _unary(lambda x: ops.slice_rows(x, 1, 3))),
        CheckTarget("op:gather_rows", _unary(lambda x: ops.gather_rows(x, np.array([2, 0, 2, 3])))),
        CheckTarget("op:scatter_rows", _unary(lambda x: ops.scatter_rows(x, np.array([1, 4, 3, 0]), 5))),
        CheckTarget("op:concat_rows", _unary(lambda x: ops.concat_rows([x, ops.slice_rows(x, 0, 2)]))),
        CheckTarget("op:dropout", _dropout_target),
        CheckTarget("op:spmm", _spmm_target),
        CheckTarget("op:weighted_spmm", _weighted_spmm_target),
        CheckTarget("op:segment_softmax", _segment_softmax_target),
        CheckTarget("op:cross_entropy", _cross_entropy_target),
    ]
    for kind in ops.ACTIVATIONS:
        if kind != "identity":
            targets.append(CheckTarget(f"op:{kind}", _unary(lambda x, k=kind: ops.activation(x, k))))
    return targets


# ---------------------------------------------------------------------------
# Model targets
# ---------------------------------------------------------------------------
def _model_target(spec: ModelSpec) -> Callable[[], tuple]:
    def build() -> tuple[Callable[[], Tensor], list[Tensor]]:
        graph = fixture_graph()
        params = init_params(spec, graph.schema, seed=5)
        index = np.concatenate([graph.splits["train"], graph.splits["val"]])

        def loss() -> Tensor:
            return cross_entropy_loss(forward(spec, params, graph, "eval"), graph.labels, index)

        return loss, list(params.values())

    return build


def model_targets() -> list[CheckTarget]:
    """All five kinds, plus the non-default aggregators of the tree family."""
    no_dropout = DropoutConfig(projection=0.0, layer=0.0, attention=0.0)
    targets: list[CheckTarget] = []
    for kind in MODEL_KINDS:
        spec = ModelSpec(kind=kind, depth=2, hidden=4, semantic_hidden=3, dropout=no_dropout)
        targets.append(CheckTarget(f"model:{spec.label}", _model_target(spec)))
    for kind in ("HetGTCN", "HetGTAN"):
        for aggregator in ("mean", "weighted_sum"):
            spec = ModelSpec(kind=kind, depth=2, hidden=4, aggregator=aggregator, dropout=no_dropout)
            targets.append(CheckTarget(f"model:{spec.label}", _model_target(spec)))
    return targets


def run_gradchecks(targets: list[CheckTarget] | None = None) -> list[CheckOutcome]:
    """Check every target in wide precision and return one outcome each."""
    outcomes: list[CheckOutcome] = []
    with precision("f64"):
        for target in targets if targets is not None else op_targets() + model_targets():
            f, params = target.build()
            err = grad_check(f, params, eps=1e-6, max_coords=64, seed=0)
            outcomes.append(CheckOutcome(target.name, err))
            _log.debug("%s: %.3e", target.name, err)
    return outcomes
