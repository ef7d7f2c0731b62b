"""Per-edge-type normalised adjacency, attention segments and k-hop reach."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy.sparse import csr_matrix

from hetgt.core.errors import RangeError
from hetgt.tensor.sparse import SegmentIndex, SparseAdjacency

if TYPE_CHECKING:
    from hetgt.graph.hetero_graph import HeteroGraph

_log = logging.getLogger(__name__)


def normalize_adjacency(g: HeteroGraph, edge_type: str) -> SparseAdjacency:
    """Row-stochastic ``D^-1 (A_k + I)`` of *edge_type* over the global index.

    Row ``u`` is non-empty only for nodes of the edge type's destination
    type: one entry per incoming source plus the self-loop, each weighted
    ``1 / (in_degree + 1)``.

    Raises:
        KeyError: If *edge_type* is not declared.
    """
    et = g.schema.edge_type(edge_type)
    src, dst = g.global_edges(edge_type)
    start, stop = g.block(et.dst)
    selfs = np.arange(start, stop, dtype=np.int64)

    rows = np.concatenate([dst, selfs])
    cols = np.concatenate([src, selfs])
    degree = np.bincount(rows, minlength=g.n_nodes).astype(np.float64)
    values = 1.0 / degree[rows]
    adj = SparseAdjacency.from_coo(rows, cols, values, (g.n_nodes, g.n_nodes))
    _log.debug("normalize_adjacency(%s): nnz=%d", edge_type, adj.nnz)
    return adj


def build_segments(g: HeteroGraph, edge_type: str) -> SegmentIndex:
    """One attention segment per destination-type node: its sources plus itself."""
    return SegmentIndex.from_adjacency(g.adjacency(edge_type))


def _union_in_neighbors(g: HeteroGraph) -> csr_matrix:
    """Boolean ``n x n`` matrix with ``[u, v] = 1`` if some edge type has ``v -> u``."""
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    for name in g.schema.edge_type_names:
        src, dst = g.global_edges(name)
        rows.append(dst)
        cols.append(src)
    r = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    c = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
    mat = csr_matrix((np.ones(r.shape[0], dtype=np.int8), (r, c)), shape=(g.n_nodes, g.n_nodes))
    mat.sum_duplicates()
    return mat


def k_hop_neighborhood(g: HeteroGraph, node: int, k: int) -> set[int]:
    """Global ids whose features can reach *node* within *k* propagation steps.

    Breadth-first over incoming edges of every edge type, *node* included.

    Raises:
        RangeError: If *node* is not a valid global id.
        ValueError: If *k* is negative.
    """
    if not 0 <= node < g.n_nodes:
        raise RangeError(f"node {node} out of range [0, {g.n_nodes})")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    incoming = _union_in_neighbors(g)
    reached = {node}
    frontier = np.array([node], dtype=np.int64)
    for _ in range(k):
        if frontier.size == 0:
            break
        nxt = np.unique(incoming[frontier].indices)
        fresh = [int(v) for v in nxt if int(v) not in reached]
        reached.update(fresh)
        frontier = np.array(fresh, dtype=np.int64)
    return reached
