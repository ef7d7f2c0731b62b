"""Heterogeneous graphs: container, dataset I/O, operators and generators."""

from hetgt.graph.adjacency import build_segments, k_hop_neighborhood, normalize_adjacency
from hetgt.graph.dataset_io import load_dataset, load_manifest, write_dataset
from hetgt.graph.fixtures import fixture_graph, fixture_schema
from hetgt.graph.hetero_graph import SPLIT_NAMES, HeteroGraph
from hetgt.graph.synthetic import generate_synthetic

__all__ = [
    "SPLIT_NAMES",
    "HeteroGraph",
    "build_segments",
    "fixture_graph",
    "fixture_schema",
    "generate_synthetic",
    "k_hop_neighborhood",
    "load_dataset",
    "load_manifest",
    "normalize_adjacency",
    "write_dataset",
]
