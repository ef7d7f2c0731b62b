"""Full-model forward passes for the five model kinds.

Tree family (HetGTCN, HetGTAN, HetGTAN_ns): every layer re-anchors each
node on its projected feature ``Z``.  Convolutional family (HetGCN,
HetGAT): ``Z`` only seeds the first layer and each layer ends in ReLU.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from hetgt.core.errors import ContractError, NumericalError, RangeError
from hetgt.core.models.config import TREE_KINDS, ModelSpec
from hetgt.graph.hetero_graph import HeteroGraph
from hetgt.nn.layers import (
    gat_edge_forward,
    gcn_edge_forward,
    gtan_edge_forward,
    gtan_edge_message,
    gtcn_edge_forward,
    mean_aggregate,
    output_head,
    project_features,
    semantic_aggregate,
    weighted_sum_aggregate,
)
from hetgt.nn.params import ModelParams
from hetgt.tensor.ops import activation, add, concat_rows, dropout, matmul, slice_rows
from hetgt.tensor.tensor import Tensor

_log = logging.getLogger(__name__)


@dataclass
class ForwardOutput:
    """Logits of the target type plus the projected features they grew from."""

    logits: Tensor
    z: Tensor


def _feature_tensors(graph: HeteroGraph) -> dict[str, Tensor]:
    return {name: Tensor(x) for name, x in graph.features.items()}


def _edge_messages(
    spec: ModelSpec,
    params: ModelParams,
    graph: HeteroGraph,
    layer: int,
    h: Tensor,
    z: Tensor,
    rng: np.random.Generator | None,
    training: bool,
) -> dict[str, Tensor]:
    """One ``N x f`` representation per edge type for propagation step *layer*."""
    p_att = spec.dropout.attention
    slope = spec.attention_slope
    hw = matmul(h, params.transform(layer)) if spec.kind in ("HetGCN", "HetGAT") else None
    out: dict[str, Tensor] = {}
    for et in graph.schema.edge_types:
        k = et.name
        try:
            if spec.kind == "HetGTCN":
                out[k] = gtcn_edge_forward(h, z, graph.adjacency(k))
            elif spec.kind == "HetGTAN":
                out[k] = gtan_edge_forward(
                    h,
                    z,
                    params.attention(layer, k),
                    graph.segments(k),
                    slope=slope,
                    attention_dropout=p_att,
                    rng=rng,
                    training=training,
                )
            elif spec.kind == "HetGTAN_ns":
                out[k] = gtan_edge_message(
                    h,
                    z,
                    params.attention(layer, k),
                    graph.segments(k),
                    slope=slope,
                    attention_dropout=p_att,
                    rng=rng,
                    training=training,
                )
            elif spec.kind == "HetGCN":
                out[k] = gcn_edge_forward(h, graph.adjacency(k), params.transform(layer), hw=hw)
            else:
                out[k] = gat_edge_forward(
                    h,
                    params.transform(layer),
                    params.attention(layer, k),
                    graph.segments(k),
                    hw=hw,
                    slope=slope,
                    attention_dropout=p_att,
                    rng=rng,
                    training=training,
                )
        except NumericalError as exc:
            raise exc.locate(layer=layer, edge_type=k) from exc
    return out


def _aggregate(spec: ModelSpec, params: ModelParams, layer: int, node_type: str, blocks: list[Tensor]) -> Tensor:
    if spec.kind == "HetGTAN_ns":
        total = blocks[0]
        for b in blocks[1:]:
            total = add(total, b)
        return activation(total, "elu")
    if spec.aggregator == "semantic":
        combined = semantic_aggregate(blocks, *params.semantic(layer, node_type))
    elif spec.aggregator == "mean":
        combined = mean_aggregate(blocks)
    else:
        combined = weighted_sum_aggregate(blocks, params.edge_weights(layer, node_type))
    if spec.kind in TREE_KINDS:
        return combined
    return activation(combined, "relu")


def _propagate(
    spec: ModelSpec,
    params: ModelParams,
    graph: HeteroGraph,
    layer: int,
    h: Tensor,
    z: Tensor,
    rng: np.random.Generator | None,
    training: bool,
) -> Tensor:
    messages = _edge_messages(spec, params, graph, layer, h, z, rng, training)
    blocks: list[Tensor] = []
    for nt in graph.schema.node_types:
        start, stop = graph.block(nt.name)
        incoming = graph.schema.incoming(nt.name)
        if not incoming:
            blocks.append(slice_rows(h, start, stop))
            continue
        parts = [slice_rows(messages[et.name], start, stop) for et in incoming]
        try:
            blocks.append(_aggregate(spec, params, layer, nt.name, parts))
        except NumericalError as exc:
            raise exc.locate(layer=layer) from exc
    return concat_rows(blocks)


def run_forward(
    spec: ModelSpec,
    params: ModelParams,
    graph: HeteroGraph,
    mode: str = "eval",
    rng: np.random.Generator | int | None = None,
) -> ForwardOutput:
    """Forward pass returning logits and the projected features ``Z``.

    Args:
        mode: ``"train"`` enables dropout, ``"eval"`` disables it.
        rng: Generator (or seed) for dropout masks; required in train mode
            when any dropout rate is non-zero.

    Raises:
        NumericalError: On a non-finite activation, annotated with the
            layer and edge type where it appeared.
    """
    if mode not in ("train", "eval"):
        raise ContractError(f"mode must be 'train' or 'eval', got {mode!r}")
    training = mode == "train"
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    schema = graph.schema

    projection = {nt.name: params.projection(nt.name) for nt in schema.node_types}
    try:
        z = project_features(_feature_tensors(graph), projection, schema.node_type_names, spec.projection_activation)
    except NumericalError as exc:
        raise exc.locate(layer=0) from exc
    z = dropout(z, spec.dropout.projection, rng, training)

    h = z
    for layer in range(1, spec.depth + 1):
        h = _propagate(spec, params, graph, layer, h, z, rng, training)
        if layer < spec.depth:
            h = dropout(h, spec.dropout.layer, rng, training)

    start, stop = graph.target_block
    logits = output_head(slice_rows(h, start, stop), *params.output(schema.target_type))
    return ForwardOutput(logits=logits, z=z)


def forward(
    spec: ModelSpec,
    params: ModelParams,
    graph: HeteroGraph,
    mode: str = "eval",
    rng: np.random.Generator | int | None = None,
) -> Tensor:
    """Target-type logits, ``|V_target| x num_classes``."""
    return run_forward(spec, params, graph, mode, rng).logits


def receptive_field_probe(
    spec: ModelSpec,
    params: ModelParams,
    graph: HeteroGraph,
    target: int,
    perturb: int,
    delta: float,
) -> float:
    """Max absolute change of *target*'s logits after adding *delta* to *perturb*'s raw features.

    Both nodes are global ids; *target* must be of the target type.
    Evaluated in eval mode.
    """
    start, stop = graph.target_block
    if not start <= target < stop:
        raise RangeError(f"node {target} is not of target type {graph.schema.target_type!r}")
    node_type, local = graph.type_of(perturb)
    base = forward(spec, params, graph, "eval").data[target - start]
    x = graph.features[node_type].copy()
    x[local] += delta
    moved = forward(spec, params, graph.with_features(node_type, x), "eval").data[target - start]
    return float(np.max(np.abs(moved.astype(np.float64) - base.astype(np.float64))))
