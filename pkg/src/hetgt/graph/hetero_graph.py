"""Immutable heterogeneous graph over a contiguous global node index."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

from hetgt.core.errors import DataError, RangeError
from hetgt.core.models.schema import Schema

if TYPE_CHECKING:
    from hetgt.tensor.sparse import SegmentIndex, SparseAdjacency

SPLIT_NAMES: tuple[str, ...] = ("train", "val", "test")


def _readonly(arr: np.ndarray, dtype: type) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class HeteroGraph:
    """Typed node sets, typed directed edges, and target-type labels/splits.

    Global ids are laid out in contiguous blocks per node type, in schema
    order.  Edges are stored per edge type as ``m x 2`` arrays of
    ``(src_local_id, dst_local_id)``.

    Args:
        schema: The validated :class:`Schema`.
        features: ``{node_type: count x feature_dim}`` matrices.
        edges: ``{edge_type: m x 2}`` local-id pairs.
        labels: Class id per target-type node.
        splits: ``{"train" | "val" | "test": local ids}`` of the target type.

    Raises:
        DataError: If any invariant is violated.
    """

    schema: Schema
    features: dict[str, np.ndarray]
    edges: dict[str, np.ndarray]
    labels: np.ndarray
    splits: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "features", {k: _readonly(v, np.float64) for k, v in self.features.items()}
        )
        object.__setattr__(
            self,
            "edges",
            {k: _readonly(np.asarray(v).reshape(-1, 2), np.int64) for k, v in self.edges.items()},
        )
        object.__setattr__(self, "labels", _readonly(self.labels, np.int64))
        object.__setattr__(
            self,
            "splits",
            {name: _readonly(self.splits.get(name, np.empty(0)), np.int64) for name in SPLIT_NAMES},
        )
        self._validate()

    def _validate(self) -> None:
        s = self.schema
        for nt in s.node_types:
            x = self.features.get(nt.name)
            if x is None:
                raise DataError(f"missing features for node type {nt.name!r}")
            if x.shape != (nt.count, nt.feature_dim):
                raise DataError(
                    f"features of {nt.name!r} have shape {x.shape}, expected ({nt.count}, {nt.feature_dim})"
                )
            if not np.isfinite(x).all():
                raise DataError(f"features of {nt.name!r} contain non-finite values")
        extra = set(self.features) - set(s.node_type_names)
        if extra:
            raise DataError(f"features given for undeclared node types {sorted(extra)}")

        for et in s.edge_types:
            e = self.edges.get(et.name)
            if e is None:
                raise DataError(f"missing edge list for edge type {et.name!r}")
            n_src, n_dst = s.node_type(et.src).count, s.node_type(et.dst).count
            bad = np.flatnonzero((e[:, 0] < 0) | (e[:, 0] >= n_src) | (e[:, 1] < 0) | (e[:, 1] >= n_dst))
            if bad.size:
                raise DataError(f"edge type {et.name!r}: endpoint out of range at edge {int(bad[0])}")
            codes = e[:, 0] * n_dst + e[:, 1]
            if np.unique(codes).size != codes.size:
                raise DataError(f"edge type {et.name!r}: duplicate edges")
            if et.src == et.dst and np.any(e[:, 0] == e[:, 1]):
                raise DataError(f"edge type {et.name!r}: self-edges are implied by normalisation")
        extra = set(self.edges) - set(s.edge_type_names)
        if extra:
            raise DataError(f"edges given for undeclared edge types {sorted(extra)}")

        n_target = s.node_type(s.target_type).count
        if self.labels.shape != (n_target,):
            raise DataError(f"labels cover {self.labels.shape[0]} nodes, expected {n_target}")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= s.num_classes):
            raise DataError(f"labels must lie in [0, {s.num_classes})")
        seen: set[int] = set()
        for name in SPLIT_NAMES:
            ids = self.splits[name]
            if ids.size and (ids.min() < 0 or ids.max() >= n_target):
                raise DataError(f"split {name!r} references a node outside the target type")
            as_set = set(ids.tolist())
            if len(as_set) != ids.size or seen & as_set:
                raise DataError(f"split {name!r} overlaps another split or repeats ids")
            seen |= as_set

    # -- global index ----------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return self.schema.total_nodes

    @cached_property
    def offsets(self) -> dict[str, int]:
        return {nt.name: self.schema.offset(nt.name) for nt in self.schema.node_types}

    def block(self, node_type: str) -> tuple[int, int]:
        """``[start, stop)`` global ids of *node_type*."""
        start = self.offsets[node_type]
        return start, start + self.schema.node_type(node_type).count

    def global_id(self, node_type: str, local_id: int) -> int:
        start, stop = self.block(node_type)
        if not 0 <= local_id < stop - start:
            raise RangeError(f"local id {local_id} out of range for node type {node_type!r}")
        return start + local_id

    def type_of(self, global_id: int) -> tuple[str, int]:
        """Return ``(node_type, local_id)`` of a global id."""
        if not 0 <= global_id < self.n_nodes:
            raise RangeError(f"global id {global_id} out of range [0, {self.n_nodes})")
        for name, start in self.offsets.items():
            stop = start + self.schema.node_type(name).count
            if start <= global_id < stop:
                return name, global_id - start
        raise RangeError(f"global id {global_id} not in any block")  # pragma: no cover

    @property
    def target_block(self) -> tuple[int, int]:
        return self.block(self.schema.target_type)

    def global_edges(self, edge_type: str) -> tuple[np.ndarray, np.ndarray]:
        """``(src_global, dst_global)`` arrays of one edge type."""
        et = self.schema.edge_type(edge_type)
        e = self.edges[edge_type]
        return e[:, 0] + self.offsets[et.src], e[:, 1] + self.offsets[et.dst]

    # -- derived operators (cached; the graph is immutable) --------------------

    @cached_property
    def _adjacency_cache(self) -> dict[str, SparseAdjacency]:
        return {}

    @cached_property
    def _segment_cache(self) -> dict[str, SegmentIndex]:
        return {}

    def adjacency(self, edge_type: str) -> SparseAdjacency:
        """Cached :func:`~hetgt.graph.adjacency.normalize_adjacency`."""
        cache = self._adjacency_cache
        if edge_type not in cache:
            from hetgt.graph.adjacency import normalize_adjacency

            cache[edge_type] = normalize_adjacency(self, edge_type)
        return cache[edge_type]

    def segments(self, edge_type: str) -> SegmentIndex:
        """Cached :func:`~hetgt.graph.adjacency.build_segments`."""
        cache = self._segment_cache
        if edge_type not in cache:
            from hetgt.graph.adjacency import build_segments

            cache[edge_type] = build_segments(self, edge_type)
        return cache[edge_type]

    # -- copies ----------------------------------------------------------------

    def with_features(self, node_type: str, features: np.ndarray) -> HeteroGraph:
        """A copy of this graph with *node_type*'s feature matrix replaced."""
        feats = dict(self.features)
        feats[node_type] = features
        return HeteroGraph(self.schema, feats, dict(self.edges), self.labels, dict(self.splits))

    def equals(self, other: HeteroGraph) -> bool:
        """Exact structural and numerical equality."""
        if self.schema != other.schema:
            return False
        same_feats = all(np.array_equal(self.features[k], other.features[k]) for k in self.features)
        same_edges = all(np.array_equal(self.edges[k], other.edges[k]) for k in self.edges)
        same_splits = all(np.array_equal(self.splits[k], other.splits[k]) for k in SPLIT_NAMES)
        return same_feats and same_edges and same_splits and np.array_equal(self.labels, other.labels)

    def summary(self) -> str:
        nodes = ", ".join(f"{n.name}={n.count}" for n in self.schema.node_types)
        edges = ", ".join(f"{k}={v.shape[0]}" for k, v in self.edges.items())
        sizes = "/".join(str(self.splits[k].size) for k in SPLIT_NAMES)
        return f"nodes[{nodes}] edges[{edges}] splits={sizes}"
