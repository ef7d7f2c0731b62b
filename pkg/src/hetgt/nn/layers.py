"""Per-layer building blocks.

Edge-type forwards map ``N x f`` inputs over the global node index to an
``N x f`` output whose rows are zero outside the edge type's destination
type.  Aggregators combine the per-edge-type row blocks of one node type.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import numpy as np

from hetgt.core.errors import ContractError, DimensionError, StructuralError
from hetgt.tensor.ops import (
    activation,
    add,
    concat_rows,
    dropout,
    gather_rows,
    matmul,
    mean_rows,
    mul,
    scatter_rows,
    slice_rows,
)
from hetgt.tensor.sparse import SegmentIndex, SparseAdjacency, segment_softmax, spmm, weighted_spmm
from hetgt.tensor.tensor import Tensor, get_dtype

ATTENTION_SLOPE = 0.2


# ---------------------------------------------------------------------------
# Projection and output
# ---------------------------------------------------------------------------


def project_features(
    features: Mapping[str, Tensor],
    projection: Mapping[str, tuple[Tensor, Tensor]],
    node_types: Sequence[str],
    nonlinearity: str = "elu",
) -> Tensor:
    """``Z``: each type's rows ``sigma(X_a W_a + b_a)`` stacked in global order.

    Raises:
        DimensionError: If a feature width does not match its weight, or
            the projected widths differ between types.
    """
    blocks: list[Tensor] = []
    for name in node_types:
        weight, bias = projection[name]
        x = features[name]
        if x.cols != weight.rows:
            raise DimensionError(f"node type {name!r}: features have {x.cols} columns, weight expects {weight.rows}")
        blocks.append(activation(add(matmul(x, weight), bias), nonlinearity))
    return concat_rows(blocks)


def output_head(h: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Logits ``H W_out + b_out`` (identity output nonlinearity)."""
    return add(matmul(h, weight), bias)


# ---------------------------------------------------------------------------
# Edge-type propagation
# ---------------------------------------------------------------------------


def gtcn_edge_forward(h: Tensor, z: Tensor, adj: SparseAdjacency) -> Tensor:
    """``sum_v A_uv H_v + A_uu Z_u``: neighbours from ``H``, self term from ``Z``."""
    if h.shape != z.shape or h.rows != adj.n_rows:
        raise DimensionError(f"gtcn: H {h.shape}, Z {z.shape}, adjacency {adj.n_rows}x{adj.n_cols}")
    neighbors = spmm(adj.without_self_loops(), h)
    return add(neighbors, mul(z, adj.self_weights()))


def _self_entries(seg: SegmentIndex) -> np.ndarray:
    """Entry id of each segment's self entry, in segment order."""
    return np.flatnonzero(seg.is_self)


def gtan_attention(
    h: Tensor,
    z: Tensor,
    att: Tensor,
    seg: SegmentIndex,
    slope: float = ATTENTION_SLOPE,
) -> Tensor:
    """Per-entry ``softmax(LeakyReLU([Z_u || K_v] a))`` with ``K_v = H_v`` (``Z_u`` for the self entry)."""
    f = z.cols
    if att.shape != (2 * f, 1):
        raise DimensionError(f"gtan: attention vector {att.shape}, expected ({2 * f}, 1)")
    a_query = slice_rows(att, 0, f)
    a_key = slice_rows(att, f, 2 * f)
    dtype = get_dtype()
    self_mask = seg.is_self.astype(dtype)[:, None]
    query = gather_rows(matmul(z, a_query), seg.targets)
    key_h = mul(gather_rows(matmul(h, a_key), seg.sources), 1 - self_mask)
    key_z = mul(gather_rows(matmul(z, a_key), seg.targets), self_mask)
    scores = activation(add(add(query, key_h), key_z), "leaky_relu", slope)
    return segment_softmax(scores, seg)


def gtan_edge_message(
    h: Tensor,
    z: Tensor,
    att: Tensor,
    seg: SegmentIndex,
    *,
    slope: float = ATTENTION_SLOPE,
    attention_dropout: float = 0.0,
    rng: np.random.Generator | None = None,
    training: bool = False,
) -> Tensor:
    """Pre-activation GTAN output ``sum_{v != u} alpha_uv H_v + alpha_uu Z_u``."""
    if h.shape != z.shape or h.rows != seg.n_nodes:
        raise DimensionError(f"gtan: H {h.shape}, Z {z.shape}, segments over {seg.n_nodes} nodes")
    alpha = dropout(gtan_attention(h, z, att, seg, slope), attention_dropout, rng, training)
    row_ptr, col_idx, entry_ids = seg.neighbor_pattern
    neighbors = weighted_spmm(row_ptr, col_idx, gather_rows(alpha, entry_ids), h)
    self_alpha = scatter_rows(gather_rows(alpha, _self_entries(seg)), seg.segment_targets, seg.n_nodes)
    return add(neighbors, mul(z, self_alpha))


def gtan_edge_forward(
    h: Tensor,
    z: Tensor,
    att: Tensor,
    seg: SegmentIndex,
    *,
    slope: float = ATTENTION_SLOPE,
    attention_dropout: float = 0.0,
    rng: np.random.Generator | None = None,
    training: bool = False,
) -> Tensor:
    """``ELU`` of :func:`gtan_edge_message`."""
    pre = gtan_edge_message(
        h, z, att, seg, slope=slope, attention_dropout=attention_dropout, rng=rng, training=training
    )
    return activation(pre, "elu")


def gcn_edge_forward(h: Tensor, adj: SparseAdjacency, weight: Tensor, hw: Tensor | None = None) -> Tensor:
    """``A (H W)`` over the self-looped adjacency; the self term uses ``H``.

    *hw* may carry a precomputed ``H W`` shared by the layer's edge types.
    """
    if h.rows != adj.n_cols:
        raise DimensionError(f"gcn: H {h.shape} against adjacency {adj.n_rows}x{adj.n_cols}")
    return spmm(adj, matmul(h, weight) if hw is None else hw)


def gat_attention(hw: Tensor, att: Tensor, seg: SegmentIndex, slope: float = ATTENTION_SLOPE) -> Tensor:
    f = hw.cols
    if att.shape != (2 * f, 1):
        raise DimensionError(f"gat: attention vector {att.shape}, expected ({2 * f}, 1)")
    query = gather_rows(matmul(hw, slice_rows(att, 0, f)), seg.targets)
    key = gather_rows(matmul(hw, slice_rows(att, f, 2 * f)), seg.sources)
    return segment_softmax(activation(add(query, key), "leaky_relu", slope), seg)


def gat_edge_forward(
    h: Tensor,
    weight: Tensor,
    att: Tensor,
    seg: SegmentIndex,
    *,
    hw: Tensor | None = None,
    slope: float = ATTENTION_SLOPE,
    attention_dropout: float = 0.0,
    rng: np.random.Generator | None = None,
    training: bool = False,
) -> Tensor:
    """``ELU(sum_v alpha_uv H_v W)``; both attention sides use the current ``H``."""
    if h.rows != seg.n_nodes:
        raise DimensionError(f"gat: H {h.shape}, segments over {seg.n_nodes} nodes")
    if hw is None:
        hw = matmul(h, weight)
    alpha = dropout(gat_attention(hw, att, seg, slope), attention_dropout, rng, training)
    row_ptr, col_idx = seg.full_pattern
    return activation(weighted_spmm(row_ptr, col_idx, alpha, hw), "elu")


# ---------------------------------------------------------------------------
# Target-specific aggregation
# ---------------------------------------------------------------------------


def _check_blocks(hs: Sequence[Tensor], op: str) -> None:
    if not hs:
        raise StructuralError(f"{op}: no edge-type representations to aggregate")
    shape = hs[0].shape
    if any(h.shape != shape for h in hs):
        raise DimensionError(f"{op}: representations differ in shape")


def semantic_weights(hs: Sequence[Tensor], weight: Tensor, bias: Tensor, query: Tensor) -> Tensor:
    """``K x 1`` edge-type importances ``softmax_k(mean_u q . tanh(W h_uk + b))``.

    Raises:
        StructuralError: If there are no representations or the node type is empty.
    """
    _check_blocks(hs, "semantic_aggregate")
    if hs[0].rows == 0:
        raise StructuralError("semantic_aggregate over an empty node type")
    scores = [matmul(mean_rows(activation(add(matmul(h, weight), bias), "tanh")), query) for h in hs]
    return segment_softmax(concat_rows(scores), np.array([0, len(hs)]))


def _weighted(hs: Sequence[Tensor], coeffs: Sequence[Tensor | np.ndarray]) -> Tensor:
    out = mul(hs[0], coeffs[0])
    for h, c in zip(hs[1:], coeffs[1:], strict=True):
        out = add(out, mul(h, c))
    return out


def semantic_aggregate(hs: Sequence[Tensor], weight: Tensor, bias: Tensor, query: Tensor) -> Tensor:
    """``sum_k beta_k H_k`` with one ``beta`` shared by every node of the type."""
    beta = semantic_weights(hs, weight, bias, query)
    return _weighted(hs, [gather_rows(beta, np.array([k])) for k in range(len(hs))])


def mean_aggregate(hs: Sequence[Tensor]) -> Tensor:
    """Elementwise mean over edge types."""
    _check_blocks(hs, "mean_aggregate")
    dtype = get_dtype()
    share = np.asarray(1, dtype=dtype) / np.asarray(len(hs), dtype=dtype)
    return _weighted(hs, [share] * len(hs))


def weighted_sum_aggregate(hs: Sequence[Tensor], theta: Tensor) -> Tensor:
    """``sum_k theta_k H_k`` with free (unnormalised) ``theta`` of shape ``K x 1``."""
    _check_blocks(hs, "weighted_sum_aggregate")
    if theta.shape != (len(hs), 1):
        raise ContractError(f"weighted_sum_aggregate: theta {theta.shape} for {len(hs)} edge types")
    return _weighted(hs, [gather_rows(theta, np.array([k])) for k in range(len(hs))])
