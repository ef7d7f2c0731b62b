"""Tests for normalised adjacency, segments and k-hop reach."""

from __future__ import annotations

import numpy as np
import pytest

from hetgt.core.errors import RangeError
from hetgt.graph.adjacency import build_segments, k_hop_neighborhood, normalize_adjacency
from tests.helpers.builders import random_graph


class TestNormalizeAdjacency:
    def test_fixture_values(self, fixture):
        ap = normalize_adjacency(fixture, "A-P")
        assert ap.row(0) == {0: 0.5, 2: 0.5}
        assert ap.row(1) == {1: 0.5, 2: 0.5}
        assert ap.row(2) == {}
        pa = normalize_adjacency(fixture, "P-A")
        assert pa.row(2) == pytest.approx({0: 1 / 3, 1: 1 / 3, 2: 1 / 3})
        assert pa.row(0) == {}

    def test_rows_are_stochastic_on_destination_type(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            g = random_graph(rng, max_nodes=20)
            for et in g.schema.edge_types:
                adj = g.adjacency(et.name)
                start, stop = g.block(et.dst)
                sums = adj.row_sums()
                assert np.allclose(sums[start:stop], 1.0, atol=1e-12)
                assert np.all(sums[:start] == 0) and np.all(sums[stop:] == 0)
                assert np.all(adj.self_weights()[start:stop, 0] > 0)

    def test_unknown_edge_type(self, fixture):
        with pytest.raises(KeyError):
            normalize_adjacency(fixture, "S-P")


class TestSegments:
    def test_one_segment_per_destination_node(self, fixture):
        seg = build_segments(fixture, "A-P")
        assert seg.n_segments == 2
        assert seg.segment(0) == [0, 2]
        assert seg.segment(1) == [1, 2]
        assert seg.segment(2) == []

    def test_pattern_matches_adjacency(self, small_graph):
        for name in small_graph.schema.edge_type_names:
            adj = small_graph.adjacency(name)
            seg = small_graph.segments(name)
            assert np.array_equal(seg.sources, adj.col_idx)
            assert np.array_equal(seg.targets, adj.row_ids)


class TestKHop:
    def test_fixture_reach(self, fixture):
        assert k_hop_neighborhood(fixture, 0, 0) == {0}
        assert k_hop_neighborhood(fixture, 0, 1) == {0, 2}
        assert k_hop_neighborhood(fixture, 0, 2) == {0, 1, 2}

    def test_reach_grows_monotonically(self, small_graph):
        previous: set[int] = set()
        for k in range(4):
            reach = k_hop_neighborhood(small_graph, 5, k)
            assert previous <= reach
            previous = reach

    def test_invalid_arguments(self, fixture):
        with pytest.raises(RangeError):
            k_hop_neighborhood(fixture, 3, 1)
        with pytest.raises(ValueError):
            k_hop_neighborhood(fixture, 0, -1)
