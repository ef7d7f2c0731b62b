"""Tests for the sparse structures and kernels."""

from __future__ import annotations

import numpy as np
import pytest
from scipy import sparse as sp

from hetgt.core.errors import DimensionError, StructuralError
from hetgt.tensor.ops import mul, sum_all
from hetgt.tensor.sparse import SegmentIndex, SparseAdjacency, segment_softmax, spmm, weighted_spmm
from hetgt.tensor.tensor import Tensor, backward


def _random_adjacency(rng: np.random.Generator, n_rows: int, n_cols: int, density: float) -> SparseAdjacency:
    m = sp.random(n_rows, n_cols, density=density, format="coo", random_state=rng)
    return SparseAdjacency.from_coo(m.row, m.col, m.data, (n_rows, n_cols))


def _self_looped(rng: np.random.Generator, n: int) -> SparseAdjacency:
    m = sp.random(n, n, density=0.3, format="csr", random_state=rng)
    m = (m + sp.identity(n, format="csr")).tocoo()
    return SparseAdjacency.from_coo(m.row, m.col, m.data, (n, n))


class TestSparseAdjacency:
    def test_from_coo_sorts_rows_and_columns(self):
        adj = SparseAdjacency.from_coo(
            np.array([1, 0, 1]), np.array([2, 1, 0]), np.array([0.3, 1.0, 0.7]), (2, 3)
        )
        assert adj.row_ptr.tolist() == [0, 1, 3]
        assert adj.col_idx.tolist() == [1, 0, 2]
        assert adj.row(1) == {0: 0.7, 2: 0.3}
        assert adj.nnz == 3

    def test_arrays_are_read_only(self):
        adj = SparseAdjacency.from_coo(np.array([0]), np.array([0]), np.array([1.0]), (1, 1))
        with pytest.raises(ValueError):
            adj.values[0] = 2.0

    @pytest.mark.parametrize(
        ("row_ptr", "col_idx", "values"),
        [
            ([1, 2], [0], [1.0]),
            ([0, 2, 1], [0], [1.0]),
            ([0, 1, 2], [0], [1.0]),
            ([0, 1, 1], [5], [1.0]),
            ([0, 2, 2], [1, 1], [1.0, 1.0]),
        ],
    )
    def test_rejects_broken_csr(self, row_ptr, col_idx, values):
        with pytest.raises(StructuralError):
            SparseAdjacency(2, 3, np.array(row_ptr), np.array(col_idx), np.array(values))

    def test_scipy_and_dense_agree(self):
        adj = _random_adjacency(np.random.default_rng(0), 7, 5, 0.4)
        assert np.array_equal(adj.to_scipy().toarray(), adj.to_dense())
        assert np.allclose(adj.row_sums(), adj.to_dense().sum(axis=1))

    def test_self_split_recomposes(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            adj = _self_looped(rng, int(rng.integers(2, 12)))
            off = adj.without_self_loops()
            assert not np.any(off.self_mask())
            recomposed = off.to_dense() + np.diagflat(adj.self_weights())
            assert np.array_equal(recomposed, adj.to_dense())


class TestSegmentIndex:
    def test_from_adjacency_matches_rows(self):
        adj = _self_looped(np.random.default_rng(2), 6)
        seg = SegmentIndex.from_adjacency(adj)
        assert seg.n_segments == 6
        assert seg.n_entries == adj.nnz
        for t in range(6):
            assert seg.segment(t) == sorted(adj.row(t))
        assert int(seg.is_self.sum()) == 6

    def test_neighbor_pattern_skips_self(self):
        adj = _self_looped(np.random.default_rng(3), 5)
        seg = SegmentIndex.from_adjacency(adj)
        row_ptr, col_idx, entry_ids = seg.neighbor_pattern
        assert row_ptr[-1] == adj.nnz - 5
        assert np.array_equal(col_idx, seg.sources[entry_ids])
        assert not np.any(seg.is_self[entry_ids])

    def test_missing_target_has_empty_segment(self):
        seg = SegmentIndex(4, np.array([1, 1]), np.array([0, 1]), np.array([0, 2]))
        assert seg.segment(1) == [0, 1]
        assert seg.segment(3) == []

    def test_requires_self_entry(self):
        with pytest.raises(StructuralError):
            SegmentIndex(3, np.array([0, 0]), np.array([1, 2]), np.array([0, 2]))

    def test_rejects_empty_segment(self):
        with pytest.raises(StructuralError):
            SegmentIndex(3, np.array([0, 1]), np.array([0, 1]), np.array([0, 1, 1, 2]))


class TestSpmm:
    def test_matches_dense_oracle(self, f64):
        rng = np.random.default_rng(4)
        for _ in range(1000):
            n_rows, n_cols = (int(v) for v in rng.integers(1, 201, size=2))
            f = int(rng.integers(1, 9))
            adj = _random_adjacency(rng, n_rows, n_cols, float(rng.uniform(0.0, 1.0)))
            x = rng.normal(size=(n_cols, f))
            out = spmm(adj, Tensor(x))
            assert np.max(np.abs(out.data - adj.to_dense() @ x), initial=0.0) <= 1e-12

    def test_backward_is_transpose(self, f64):
        rng = np.random.default_rng(5)
        adj = _random_adjacency(rng, 4, 6, 0.5)
        x = Tensor(rng.normal(size=(6, 3)), requires_grad=True)
        g = rng.normal(size=(4, 3))
        backward(sum_all(mul(spmm(adj, x), g)))
        assert np.allclose(x.grad, adj.to_dense().T @ g)

    def test_dimension_mismatch(self):
        adj = SparseAdjacency.from_coo(np.array([0]), np.array([0]), np.array([1.0]), (1, 2))
        with pytest.raises(DimensionError):
            spmm(adj, Tensor(np.ones((3, 1))))

    def test_weighted_spmm_matches_dense(self, f64):
        rng = np.random.default_rng(6)
        adj = _random_adjacency(rng, 5, 4, 0.5)
        w = Tensor(rng.normal(size=(adj.nnz, 1)), requires_grad=True)
        x = Tensor(rng.normal(size=(4, 2)), requires_grad=True)
        out = weighted_spmm(adj.row_ptr, adj.col_idx, w, x)
        dense = np.zeros((5, 4))
        dense[adj.row_ids, adj.col_idx] = w.data[:, 0]
        assert np.allclose(out.data, dense @ x.data)
        backward(sum_all(out))
        assert np.allclose(x.grad, dense.T @ np.ones((5, 2)))
        assert np.allclose(w.grad[:, 0], x.data[adj.col_idx].sum(axis=1))

    def test_weighted_spmm_weight_count(self):
        with pytest.raises(DimensionError):
            weighted_spmm(np.array([0, 1]), np.array([0]), Tensor(np.ones((2, 1))), Tensor(np.ones((1, 1))))


class TestSegmentSoftmax:
    def test_segments_sum_to_one(self, f64):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            sizes = rng.integers(1, 6, size=int(rng.integers(1, 8)))
            offsets = np.concatenate([[0], np.cumsum(sizes)])
            scores = Tensor(rng.uniform(-50.0, 50.0, size=(int(offsets[-1]), 1)))
            y = segment_softmax(scores, offsets).data[:, 0]
            assert np.all(y >= 0)
            assert np.max(np.abs(np.add.reduceat(y, offsets[:-1]) - 1.0)) <= 1e-12

    def test_single_entry_segment_is_one(self):
        y = segment_softmax(Tensor([[3.0], [-1.0], [2.0]]), np.array([0, 1, 3]))
        assert y.data[0, 0] == 1.0

    def test_large_scores_are_stable(self):
        y = segment_softmax(Tensor([[1e4], [1e4]]), np.array([0, 2]))
        assert np.allclose(y.data[:, 0], [0.5, 0.5])

    def test_empty_segment(self):
        with pytest.raises(StructuralError):
            segment_softmax(Tensor([[1.0]]), np.array([0, 0, 1]))

    def test_score_count_mismatch(self):
        with pytest.raises(DimensionError):
            segment_softmax(Tensor([[1.0], [2.0]]), np.array([0, 1]))
