"""Seeded desk-scale heterogeneous graphs with a planted class signal."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from hetgt.config.config_manager import validate_model
from hetgt.core.models.config import SyntheticSpec
from hetgt.core.models.schema import EdgeType, NodeType, Schema
from hetgt.graph.hetero_graph import HeteroGraph

_log = logging.getLogger(__name__)

# Neighbour-mixed features of non-target nodes get this much extra noise.
_MIX_NOISE = 0.5


def _communities(rng: np.random.Generator, n: int, n_classes: int) -> np.ndarray:
    """Balanced community ids ``0..n_classes-1`` in random order."""
    return rng.permutation(np.arange(n) % n_classes)


def _sample_relation(
    rng: np.random.Generator,
    comm_src: np.ndarray,
    comm_dst: np.ndarray,
    degree: float,
    homophily: float,
    same_type: bool,
) -> np.ndarray:
    """``m x 2`` unique ``(src, dst)`` pairs, ``m ~= degree * n_dst``.

    A share *homophily* of the draws picks the source from the destination's
    community; the rest are uniform.
    """
    n_src, n_dst = comm_src.shape[0], comm_dst.shape[0]
    capacity = n_src * n_dst - (n_dst if same_type else 0)
    target = min(int(round(degree * n_dst)), capacity)
    if target <= 0:
        return np.empty((0, 2), dtype=np.int64)

    n_classes = int(max(comm_src.max(), comm_dst.max())) + 1
    pools = [np.flatnonzero(comm_src == c) for c in range(n_classes)]
    kept = np.empty((0, 2), dtype=np.int64)
    for _ in range(8):
        k = 2 * (target - kept.shape[0]) + 8
        dst = rng.integers(n_dst, size=k)
        src = rng.integers(n_src, size=k)
        same = rng.random(k) < homophily
        for c, pool in enumerate(pools):
            pick = same & (comm_dst[dst] == c)
            if pool.size and pick.any():
                src[pick] = pool[rng.integers(pool.size, size=int(pick.sum()))]
        cand = np.column_stack([src, dst]).astype(np.int64)
        if same_type:
            cand = cand[cand[:, 0] != cand[:, 1]]
        merged = np.concatenate([kept, cand])
        _, first = np.unique(merged[:, 0] * n_dst + merged[:, 1], return_index=True)
        kept = merged[np.sort(first)][:target]
        if kept.shape[0] >= target:
            break
    return kept


def _balanced_splits(
    rng: np.random.Generator, labels: np.ndarray, n_classes: int, train: float, val: float
) -> dict[str, np.ndarray]:
    parts: dict[str, list[np.ndarray]] = {"train": [], "val": [], "test": []}
    for c in range(n_classes):
        members = rng.permutation(np.flatnonzero(labels == c))
        n_train = max(1, int(round(train * members.size))) if members.size else 0
        n_val = int(round(val * members.size))
        parts["train"].append(members[:n_train])
        parts["val"].append(members[n_train : n_train + n_val])
        parts["test"].append(members[n_train + n_val :])
    return {name: np.sort(np.concatenate(chunks)) for name, chunks in parts.items()}


def generate_synthetic(spec: SyntheticSpec | dict[str, Any]) -> HeteroGraph:
    """Build a random heterogeneous graph from *spec*; identical output per seed.

    Every node gets a latent community; target-type communities are the
    class labels.  Target features are ``N(0, 1)`` plus
    ``signal_strength`` on axis ``class``; each non-target
    node's features are the mean of its target-type in-neighbours plus
    noise (pure noise when it has none).

    Raises:
        ConfigError: If *spec* is a dict that fails validation (for
            example ``num_classes = 0``).
    """
    if not isinstance(spec, SyntheticSpec):
        spec = validate_model(SyntheticSpec, spec)
    rng = np.random.default_rng(spec.seed)
    n_classes = spec.num_classes
    d = spec.feature_dim

    communities = {nt.name: _communities(rng, nt.count, n_classes) for nt in spec.node_types}
    labels = communities[spec.target_type]

    edge_types: list[EdgeType] = []
    edges: dict[str, np.ndarray] = {}
    for rel in spec.relations:
        pairs = _sample_relation(
            rng,
            communities[rel.src],
            communities[rel.dst],
            rel.degree,
            spec.homophily,
            same_type=rel.src == rel.dst,
        )
        name = f"{rel.src}-{rel.dst}"
        edge_types.append(EdgeType(name=name, src=rel.src, dst=rel.dst))
        edges[name] = pairs
        if spec.add_reverse:
            rev = f"{rel.dst}-{rel.src}"
            edge_types.append(EdgeType(name=rev, src=rel.dst, dst=rel.src))
            edges[rev] = pairs[:, ::-1].copy()

    n_target = spec.count_of(spec.target_type)
    target_x = rng.standard_normal((n_target, d))
    target_x[np.arange(n_target), labels] += spec.signal_strength

    features: dict[str, np.ndarray] = {spec.target_type: target_x}
    for nt in spec.node_types:
        if nt.name == spec.target_type:
            continue
        total = np.zeros((nt.count, d))
        hits = np.zeros(nt.count)
        for et in edge_types:
            if et.src == spec.target_type and et.dst == nt.name:
                pairs = edges[et.name]
                np.add.at(total, pairs[:, 1], target_x[pairs[:, 0]])
                np.add.at(hits, pairs[:, 1], 1.0)
        mixed = total / np.maximum(hits, 1.0)[:, None]
        features[nt.name] = mixed + _MIX_NOISE * rng.standard_normal((nt.count, d))

    splits = _balanced_splits(rng, labels, n_classes, spec.train_fraction, spec.val_fraction)
    schema = validate_model(
        Schema,
        {
            "node_types": [NodeType(name=nt.name, count=nt.count, feature_dim=d) for nt in spec.node_types],
            "edge_types": edge_types,
            "target_type": spec.target_type,
            "num_classes": n_classes,
        },
    )
    graph = HeteroGraph(schema=schema, features=features, edges=edges, labels=labels, splits=splits)
    _log.info("Generated synthetic graph (seed=%d): %s", spec.seed, graph.summary())
    return graph
