"""Tests for full-model forward passes."""

from __future__ import annotations

import numpy as np
import pytest

from hetgt.core.errors import ContractError, NumericalError, RangeError
from hetgt.core.models.config import MODEL_KINDS, TREE_KINDS, ModelSpec
from hetgt.core.models.schema import Schema
from hetgt.graph.adjacency import k_hop_neighborhood
from hetgt.graph.hetero_graph import HeteroGraph
from hetgt.nn.models import forward, receptive_field_probe, run_forward
from hetgt.nn.params import init_params
from hetgt.tensor.ops import sum_all
from hetgt.tensor.tensor import Tape
from tests.helpers.builders import homogeneous_graph, permute_type, random_graph


def _spec(kind: str, depth: int = 2, aggregator: str = "semantic", **kw) -> ModelSpec:
    return ModelSpec.model_validate(
        {
            "kind": kind,
            "depth": depth,
            "hidden": 4,
            "semantic_hidden": 3,
            "aggregator": aggregator,
            "dropout": {"projection": 0.0, "layer": 0.0, "attention": 0.0},
            **kw,
        }
    )


class TestForward:
    @pytest.mark.parametrize("kind", MODEL_KINDS)
    @pytest.mark.parametrize("aggregator", ["semantic", "mean", "weighted_sum"])
    def test_logit_shape(self, small_graph, kind, aggregator):
        spec = _spec(kind, aggregator=aggregator)
        out = run_forward(spec, init_params(spec, small_graph.schema, 0), small_graph)
        assert out.logits.shape == (60, 3)
        assert out.z.shape == (small_graph.n_nodes, 4)

    def test_eval_is_deterministic(self, small_graph):
        spec = _spec("HetGTAN")
        params = init_params(spec, small_graph.schema, 0)
        assert np.array_equal(forward(spec, params, small_graph).data, forward(spec, params, small_graph).data)

    def test_train_mode_dropout_is_seeded(self, small_graph):
        spec = _spec("HetGTAN", dropout={"projection": 0.0, "layer": 0.5, "attention": 0.0})
        params = init_params(spec, small_graph.schema, 0)
        a = forward(spec, params, small_graph, "train", rng=3).data
        b = forward(spec, params, small_graph, "train", rng=3).data
        c = forward(spec, params, small_graph, "eval").data
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_unknown_mode(self, fixture):
        spec = _spec("HetGTCN")
        with pytest.raises(ContractError):
            forward(spec, init_params(spec, fixture.schema, 0), fixture, mode="predict")

    def test_type_without_incoming_edges_keeps_its_state(self, small_graph, f64):
        # no edge type ends in S, so S carries its projected features through every layer
        s = small_graph.schema
        kept = tuple(et for et in s.edge_types if et.dst != "S")
        schema = Schema(node_types=s.node_types, edge_types=kept, target_type="P", num_classes=3)
        g = HeteroGraph(
            schema,
            dict(small_graph.features),
            {et.name: small_graph.edges[et.name] for et in kept},
            small_graph.labels,
            dict(small_graph.splits),
        )
        spec = _spec("HetGTCN", depth=3)
        params = init_params(spec, schema, 0)
        base = forward(spec, params, g).data
        x = g.features["S"].copy()
        x[0] += 1.0
        moved = forward(spec, params, g.with_features("S", x)).data
        assert not np.array_equal(base, moved)


class TestStructuralProperties:
    def test_permutation_equivariance(self, f64):
        rng = np.random.default_rng(0)
        for trial in range(1000):
            g = random_graph(rng, max_nodes=30)
            kind = MODEL_KINDS[trial % len(MODEL_KINDS)]
            spec = _spec(kind, depth=int(rng.integers(1, 4)))
            node_type = g.schema.node_type_names[int(rng.integers(len(g.schema.node_types)))]
            perm = rng.permutation(g.schema.node_type(node_type).count)
            params = init_params(spec, g.schema, trial)
            base = forward(spec, params, g).data
            moved = forward(spec, params, permute_type(g, node_type, perm)).data
            expected = base[perm] if node_type == g.schema.target_type else base
            assert np.allclose(moved, expected, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("kind", MODEL_KINDS)
    def test_locality(self, kind):
        rng = np.random.default_rng(MODEL_KINDS.index(kind))
        checked = 0
        for _ in range(4):
            g = random_graph(rng, max_nodes=60)
            for depth in (1, 2, 3):
                # node-local aggregators keep the receptive field at depth hops
                spec = _spec(kind, depth=depth, aggregator="mean")
                params = init_params(spec, g.schema, depth)
                target = int(rng.integers(g.target_block[1]))
                reach = k_hop_neighborhood(g, target, depth)
                outside = [v for v in range(g.n_nodes) if v not in reach]
                for v in rng.permutation(outside)[:5]:
                    assert receptive_field_probe(spec, params, g, target, int(v), 3.0) == 0.0
                    checked += 1
                if kind in TREE_KINDS:
                    assert receptive_field_probe(spec, params, g, target, target, 3.0) > 0.0
        assert checked > 0

    @pytest.mark.parametrize("kind", ["HetGTCN", "HetGTAN"])
    def test_tree_models_reuse_z_in_every_layer(self, small_graph, kind):
        depth = 3
        spec = _spec(kind, depth=depth)
        out = run_forward(spec, init_params(spec, small_graph.schema, 0), small_graph)
        tape = Tape.record(sum_all(out.logits))
        anchors = [n for n in tape.consumers(out.z) if n.op == "mul"]
        assert len(anchors) == depth * len(small_graph.schema.edge_types)

    def test_gcn_uses_z_only_in_first_layer(self, small_graph):
        spec = _spec("HetGCN", depth=3)
        out = run_forward(spec, init_params(spec, small_graph.schema, 0), small_graph)
        tape = Tape.record(sum_all(out.logits))
        assert [n.op for n in tape.consumers(out.z)] == ["matmul"]

    def test_homogeneous_gcn_matches_dense_stack(self):
        n = 8
        src = np.concatenate([np.arange(n), np.arange(n)])
        dst = np.concatenate([(np.arange(n) + 1) % n, (np.arange(n) + 3) % n])
        rng = np.random.default_rng(1)
        g = homogeneous_graph(n, np.column_stack([src, dst]), rng.normal(size=(n, 3)), np.arange(n) % 2)
        spec = _spec("HetGCN", depth=3)
        params = init_params(spec, g.schema, 0)

        a = np.eye(n)
        a[dst, src] = 1.0
        a_hat = a / a.sum(axis=1, keepdims=True)
        w, b = (t.data.astype(np.float64) for t in params.projection("N"))
        h = g.features["N"] @ w + b
        h = np.where(h > 0, h, np.expm1(np.minimum(h, 0)))
        for t in range(1, 4):
            h = np.maximum(a_hat @ (h @ params.transform(t).data.astype(np.float64)), 0)
        w_out, b_out = (t.data.astype(np.float64) for t in params.output("N"))
        expected = h @ w_out + b_out

        assert np.allclose(forward(spec, params, g).data, expected, rtol=1e-5, atol=1e-6)


class TestNumericalErrors:
    def test_located_at_layer_and_edge_type(self, small_graph):
        spec = _spec("HetGTAN", hidden=8, projection_activation="sigmoid")
        params = init_params(spec, small_graph.schema, 0)
        for nt in small_graph.schema.node_type_names:
            params.projection(nt)[1].data[...] = 5.0
        params.attention(1, "A-P").data[...] = 3e38
        with pytest.raises(NumericalError) as exc_info:
            forward(spec, params, small_graph)
        err = exc_info.value
        assert (err.op, err.layer, err.edge_type) == ("matmul", 1, "A-P")

    def test_located_at_projection(self, fixture):
        spec = _spec("HetGTCN")
        params = init_params(spec, fixture.schema, 0)
        params.projection("P")[0].data[...] = 3e38
        g = fixture.with_features("P", np.ones((2, 3)))
        with pytest.raises(NumericalError) as exc_info:
            forward(spec, params, g)
        assert exc_info.value.layer == 0
        assert exc_info.value.edge_type is None


class TestReceptiveFieldProbe:
    def test_requires_target_type_node(self, fixture):
        spec = _spec("HetGTCN")
        with pytest.raises(RangeError):
            receptive_field_probe(spec, init_params(spec, fixture.schema, 0), fixture, 2, 0, 1.0)

    def test_neighbour_moves_logits(self, fixture):
        spec = _spec("HetGTCN", depth=1)
        params = init_params(spec, fixture.schema, 0)
        # p1 is two hops from p0 (via a0)
        assert receptive_field_probe(spec, params, fixture, 0, 1, 1.0) == 0.0
        assert receptive_field_probe(spec, params, fixture, 0, 2, 1.0) > 0.0
