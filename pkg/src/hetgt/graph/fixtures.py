"""The canonical three-node graph used by gradient checks and tests."""

from __future__ import annotations

import numpy as np

from hetgt.core.models.schema import EdgeType, NodeType, Schema
from hetgt.graph.hetero_graph import HeteroGraph


def fixture_schema() -> Schema:
    return Schema(
        node_types=(NodeType(name="P", count=2, feature_dim=3), NodeType(name="A", count=1, feature_dim=2)),
        edge_types=(EdgeType(name="A-P", src="A", dst="P"), EdgeType(name="P-A", src="P", dst="A")),
        target_type="P",
        num_classes=2,
    )


def fixture_graph() -> HeteroGraph:
    """Papers p0, p1 (global 0, 1) and author a0 (global 2), both written by a0.

    Edge types ``A-P`` (a0 -> p0, a0 -> p1) and its reverse ``P-A``.
    Labels ``[0, 1]``; train ``[0]``, val ``[1]``, empty test split.
    """
    return HeteroGraph(
        schema=fixture_schema(),
        features={
            "P": np.array([[0.5, -1.0, 0.25], [-0.75, 0.5, 1.0]]),
            "A": np.array([[1.0, -0.5]]),
        },
        edges={"A-P": np.array([[0, 0], [0, 1]]), "P-A": np.array([[0, 0], [1, 0]])},
        labels=np.array([0, 1]),
        splits={"train": np.array([0]), "val": np.array([1]), "test": np.array([], dtype=np.int64)},
    )
