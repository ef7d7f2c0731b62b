"""Test helpers: synthetic specs, random graphs and config files."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from hetgt.core.models.schema import EdgeType, NodeType, Schema
from hetgt.graph.hetero_graph import HeteroGraph
from hetgt.graph.synthetic import generate_synthetic


def synthetic_spec(**overrides: Any) -> dict[str, Any]:
    """Raw ACM-shaped spec: P (target), A, S; relations A->P and S->P plus reverses."""
    spec: dict[str, Any] = {
        "node_types": [{"name": "P", "count": 60}, {"name": "A", "count": 40}, {"name": "S", "count": 6}],
        "relations": [{"src": "A", "dst": "P", "degree": 2.0}, {"src": "S", "dst": "P", "degree": 1.0}],
        "target_type": "P",
        "feature_dim": 6,
        "num_classes": 3,
        "signal_strength": 4.0,
        "seed": 7,
    }
    spec.update(overrides)
    return spec


def random_graph(rng: np.random.Generator, max_nodes: int = 40) -> HeteroGraph:
    """A random synthetic graph with 2-3 node types, a same-type relation sometimes included."""
    n_types = int(rng.integers(2, 4))
    names = ["P", "A", "S"][:n_types]
    budget = max(max_nodes // n_types, 2)
    node_types = [{"name": n, "count": int(rng.integers(2, budget + 1))} for n in names]
    relations: list[dict[str, Any]] = []
    for n in names[1:]:
        relations.append({"src": n, "dst": "P", "degree": float(rng.uniform(0.5, 2.5))})
        relations.append({"src": "P", "dst": n, "degree": float(rng.uniform(0.5, 2.5))})
    if rng.random() < 0.5:
        relations.append({"src": "P", "dst": "P", "degree": float(rng.uniform(0.5, 1.5))})
    return generate_synthetic(
        {
            "node_types": node_types,
            "relations": relations,
            "add_reverse": False,
            "target_type": "P",
            "feature_dim": int(rng.integers(2, 5)),
            "num_classes": 2,
            "seed": int(rng.integers(0, 2**31)),
        }
    )


def permute_type(graph: HeteroGraph, node_type: str, perm: np.ndarray) -> HeteroGraph:
    """Relabel *node_type*'s local ids: old id ``perm[i]`` becomes new id ``i``."""
    inverse = np.empty_like(perm)
    inverse[perm] = np.arange(perm.size)
    features = dict(graph.features)
    features[node_type] = graph.features[node_type][perm]
    edges: dict[str, np.ndarray] = {}
    for et in graph.schema.edge_types:
        e = graph.edges[et.name].copy()
        if et.src == node_type:
            e[:, 0] = inverse[e[:, 0]]
        if et.dst == node_type:
            e[:, 1] = inverse[e[:, 1]]
        edges[et.name] = e
    labels = graph.labels
    splits = dict(graph.splits)
    if node_type == graph.schema.target_type:
        labels = graph.labels[perm]
        splits = {k: np.sort(inverse[v]) for k, v in graph.splits.items()}
    return HeteroGraph(graph.schema, features, edges, labels, splits)


def homogeneous_graph(n: int, edges: np.ndarray, features: np.ndarray, labels: np.ndarray) -> HeteroGraph:
    """One node type ``N`` and one edge type ``N-N``."""
    schema = Schema.model_validate(
        {
            "node_types": [NodeType(name="N", count=n, feature_dim=features.shape[1])],
            "edge_types": [EdgeType(name="N-N", src="N", dst="N")],
            "target_type": "N",
            "num_classes": int(labels.max()) + 1,
        },
        context={"allow_homogeneous": True},
    )
    return HeteroGraph(schema, {"N": features}, {"N-N": edges}, labels, {"train": np.arange(n)})


def write_experiment_config(directory: Path, name: str = "config.json", **overrides: Any) -> Path:
    """Write a quick CLI config (5 runs, a few epochs, console logging) and return its path."""
    config: dict[str, Any] = {
        "system": {"log_level": "INFO", "log_dir": None, "threads": 1},
        "synthetic": synthetic_spec(),
        "model": {"kind": "HetGTAN", "depth": 2, "hidden": 8, "semantic_hidden": 8},
        "train": {"max_epochs": 6, "patience": 3, "seed": 0},
        "runs": 5,
        "output_dir": str(directory / "out"),
    }
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(config.get(key), dict):
            config[key] = {**config[key], **value}
        else:
            config[key] = value
    path = directory / name
    path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return path
