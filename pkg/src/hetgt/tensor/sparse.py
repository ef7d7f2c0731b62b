"""CSR adjacency, attention segments, and the sparse/segmented kernels.

:class:`SparseAdjacency` values are constants: no gradient flows into
them.  :func:`weighted_spmm` is the learnable-weight counterpart used by
the attention layers; both multiply through the same
``scipy.sparse.csr_matrix`` kernel so identical weights give identical
results.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix

from hetgt.core.errors import DimensionError, StructuralError
from hetgt.tensor.tensor import Tensor


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, order="C", copy=True)
    arr.setflags(write=False)
    return arr


def _rows_of(row_ptr: np.ndarray) -> np.ndarray:
    """Expand CSR offsets into one row id per stored entry."""
    return np.repeat(np.arange(row_ptr.shape[0] - 1, dtype=np.int64), np.diff(row_ptr))


def _csr_product(
    values: np.ndarray,
    col_idx: np.ndarray,
    row_ptr: np.ndarray,
    shape: tuple[int, int],
    x: np.ndarray,
) -> np.ndarray:
    mat = csr_matrix((np.array(values, dtype=x.dtype), col_idx, row_ptr), shape=shape)
    return np.asarray(mat @ x)


def _csr_transpose_product(
    values: np.ndarray,
    col_idx: np.ndarray,
    row_ptr: np.ndarray,
    shape: tuple[int, int],
    g: np.ndarray,
) -> np.ndarray:
    mat = csr_matrix((np.array(values, dtype=g.dtype), col_idx, row_ptr), shape=shape)
    return np.asarray(mat.T @ g)


# ---------------------------------------------------------------------------
# SparseAdjacency
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SparseAdjacency:
    """Row-normalised adjacency of one edge type over the global node index.

    Invariants (checked on construction): ``row_ptr`` is non-decreasing
    and ends at ``nnz``; column ids are strictly increasing within a row.
    """

    n_rows: int
    n_cols: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "row_ptr", _freeze(np.asarray(self.row_ptr, dtype=np.int64)))
        object.__setattr__(self, "col_idx", _freeze(np.asarray(self.col_idx, dtype=np.int64)))
        object.__setattr__(self, "values", _freeze(np.asarray(self.values, dtype=np.float64)))
        rp, ci = self.row_ptr, self.col_idx
        if rp.shape != (self.n_rows + 1,) or rp[0] != 0:
            raise StructuralError("row_ptr must have n_rows + 1 entries starting at 0")
        if np.any(np.diff(rp) < 0):
            raise StructuralError("row_ptr must be non-decreasing")
        if rp[-1] != ci.shape[0] or ci.shape != self.values.shape:
            raise StructuralError("row_ptr[-1], col_idx and values must agree on nnz")
        if ci.size and (ci.min() < 0 or ci.max() >= self.n_cols):
            raise StructuralError("col_idx out of range")
        if ci.size > 1:
            rows = _rows_of(rp)
            same_row = rows[1:] == rows[:-1]
            if np.any(same_row & (ci[1:] <= ci[:-1])):
                raise StructuralError("col_idx must be strictly increasing within each row")

    @classmethod
    def from_coo(
        cls,
        rows: np.ndarray,
        cols: np.ndarray,
        values: np.ndarray,
        shape: tuple[int, int],
    ) -> SparseAdjacency:
        """Build from unsorted, duplicate-free coordinate triplets."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        order = np.lexsort((cols, rows))
        counts = np.bincount(rows, minlength=shape[0])
        row_ptr = np.concatenate([[0], np.cumsum(counts)])
        return cls(shape[0], shape[1], row_ptr, cols[order], np.asarray(values)[order])

    @property
    def nnz(self) -> int:
        return int(self.col_idx.shape[0])

    @cached_property
    def row_ids(self) -> np.ndarray:
        return _freeze(_rows_of(self.row_ptr))

    def row(self, i: int) -> dict[int, float]:
        """Return row *i* as ``{col: value}``."""
        lo, hi = self.row_ptr[i], self.row_ptr[i + 1]
        return {int(c): float(v) for c, v in zip(self.col_idx[lo:hi], self.values[lo:hi], strict=True)}

    def row_sums(self) -> np.ndarray:
        return np.bincount(self.row_ids, weights=self.values, minlength=self.n_rows)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n_rows, self.n_cols))
        dense[self.row_ids, self.col_idx] = self.values
        return dense

    def to_scipy(self) -> csr_matrix:
        return csr_matrix((self.values, self.col_idx, self.row_ptr), shape=(self.n_rows, self.n_cols))

    def self_mask(self) -> np.ndarray:
        return self.row_ids == self.col_idx

    def without_self_loops(self) -> SparseAdjacency:
        """The neighbour part: every diagonal entry removed."""
        keep = ~self.self_mask()
        counts = np.bincount(self.row_ids[keep], minlength=self.n_rows)
        row_ptr = np.concatenate([[0], np.cumsum(counts)])
        return SparseAdjacency(self.n_rows, self.n_cols, row_ptr, self.col_idx[keep], self.values[keep])

    def self_weights(self) -> np.ndarray:
        """Diagonal entries as an ``n_rows x 1`` column (zero where absent)."""
        diag = np.zeros((self.n_rows, 1))
        mask = self.self_mask()
        diag[self.row_ids[mask], 0] = self.values[mask]
        return diag


# ---------------------------------------------------------------------------
# SegmentIndex
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SegmentIndex:
    """Attention entries ``(target, source)`` grouped by target.

    Entries are sorted by target and then by source, so they line up with
    the CSR pattern of the self-looped adjacency.  Each target owns one
    contiguous segment containing exactly one self entry.
    """

    n_nodes: int
    targets: np.ndarray
    sources: np.ndarray
    offsets: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", _freeze(np.asarray(self.targets, dtype=np.int64)))
        object.__setattr__(self, "sources", _freeze(np.asarray(self.sources, dtype=np.int64)))
        object.__setattr__(self, "offsets", _freeze(np.asarray(self.offsets, dtype=np.int64)))
        off = self.offsets
        if off.ndim != 1 or off.size < 1 or off[0] != 0 or off[-1] != self.targets.size:
            raise StructuralError("segment offsets must start at 0 and end at the entry count")
        if np.any(np.diff(off) <= 0):
            raise StructuralError("every segment must be non-empty")
        seg_targets = self.targets[off[:-1]]
        if np.any(self.targets != np.repeat(seg_targets, np.diff(off))):
            raise StructuralError("each segment must share a single target")
        if np.any(np.diff(seg_targets) <= 0):
            raise StructuralError("segments must be sorted by unique target")
        if off.size == 1:
            return
        self_counts = np.add.reduceat(self.is_self.astype(np.int64), off[:-1])
        if np.any(self_counts != 1):
            raise StructuralError("each segment must contain exactly one self entry")

    @classmethod
    def from_adjacency(cls, adj: SparseAdjacency) -> SegmentIndex:
        """One segment per non-empty row of *adj*, in CSR entry order."""
        counts = np.diff(adj.row_ptr)
        offsets = np.concatenate([[0], np.cumsum(counts[counts > 0])])
        return cls(adj.n_rows, adj.row_ids, adj.col_idx, offsets)

    @property
    def n_entries(self) -> int:
        return int(self.targets.shape[0])

    @property
    def n_segments(self) -> int:
        return int(self.offsets.shape[0] - 1)

    @cached_property
    def is_self(self) -> np.ndarray:
        return _freeze(self.targets == self.sources)

    @cached_property
    def segment_ids(self) -> np.ndarray:
        return _freeze(np.repeat(np.arange(self.n_segments), np.diff(self.offsets)))

    @cached_property
    def segment_targets(self) -> np.ndarray:
        return _freeze(self.targets[self.offsets[:-1]])

    @cached_property
    def neighbor_pattern(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR ``(row_ptr, col_idx, entry_ids)`` of the non-self entries."""
        keep = ~self.is_self
        counts = np.bincount(self.targets[keep], minlength=self.n_nodes)
        row_ptr = np.concatenate([[0], np.cumsum(counts)])
        return row_ptr, self.sources[keep], np.flatnonzero(keep)

    @cached_property
    def full_pattern(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR ``(row_ptr, col_idx)`` of all entries over ``n_nodes`` rows."""
        counts = np.bincount(self.targets, minlength=self.n_nodes)
        return np.concatenate([[0], np.cumsum(counts)]), self.sources

    def segment(self, target: int) -> list[int]:
        """Sources of *target*'s segment (self included)."""
        pos = int(np.searchsorted(self.segment_targets, target))
        if pos >= self.n_segments or self.segment_targets[pos] != target:
            return []
        lo, hi = self.offsets[pos], self.offsets[pos + 1]
        return [int(s) for s in self.sources[lo:hi]]


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------
def spmm(s: SparseAdjacency, x: Tensor) -> Tensor:
    """``y = S @ x`` with constant *S*; backward accumulates ``S.T @ g``.

    Raises:
        DimensionError: If ``s.n_cols != x.rows``.
    """
    if s.n_cols != x.rows:
        raise DimensionError(f"spmm: sparse {s.n_rows}x{s.n_cols} @ {x.shape}")
    shape = (s.n_rows, s.n_cols)
    out = _csr_product(s.values, s.col_idx, s.row_ptr, shape, x.data)

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (_csr_transpose_product(s.values, s.col_idx, s.row_ptr, shape, g),)

    return Tensor.from_op(out, "spmm", (x,), _backward)


def weighted_spmm(
    row_ptr: np.ndarray,
    col_idx: np.ndarray,
    weights: Tensor,
    x: Tensor,
) -> Tensor:
    """``y = W @ x`` where ``W`` has the given CSR pattern and learnable values.

    Args:
        row_ptr: CSR offsets (``n_rows + 1``).
        col_idx: Column id per stored entry.
        weights: ``nnz x 1`` tensor of entry values.
        x: Dense right operand.
    """
    n_rows = row_ptr.shape[0] - 1
    if weights.shape != (col_idx.shape[0], 1):
        raise DimensionError(f"weighted_spmm: weights {weights.shape} for {col_idx.shape[0]} entries")
    shape = (n_rows, x.rows)
    w = weights.data[:, 0]
    out = _csr_product(w, col_idx, row_ptr, shape, x.data)
    rows = _rows_of(row_ptr)

    def _backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        dw = np.einsum("ij,ij->i", g[rows], x.data[col_idx])[:, None]
        dx = _csr_transpose_product(w, col_idx, row_ptr, shape, g)
        return dw.astype(g.dtype, copy=False), dx

    return Tensor.from_op(out, "weighted_spmm", (weights, x), _backward)


def segment_softmax(scores: Tensor, seg: SegmentIndex | np.ndarray) -> Tensor:
    """Softmax of a score column within each segment.

    Args:
        scores: ``n_entries x 1`` tensor.
        seg: A :class:`SegmentIndex`, or bare segment offsets.

    Raises:
        StructuralError: If any segment is empty.
        DimensionError: If the score count does not match the entries.
    """
    offsets = seg.offsets if isinstance(seg, SegmentIndex) else np.asarray(seg, dtype=np.int64)
    sizes = np.diff(offsets)
    if np.any(sizes <= 0):
        raise StructuralError("segment_softmax: empty segment")
    if scores.shape != (int(offsets[-1]), 1):
        raise DimensionError(f"segment_softmax: scores {scores.shape} for {offsets[-1]} entries")
    if sizes.size == 0:
        return Tensor.from_op(scores.data.copy(), "segment_softmax", (scores,), lambda g: (g,))
    starts = offsets[:-1]
    seg_ids = np.repeat(np.arange(sizes.shape[0]), sizes)
    s = scores.data[:, 0]
    shifted = s - np.maximum.reduceat(s, starts)[seg_ids]
    e = np.exp(shifted)
    y = e / np.add.reduceat(e, starts)[seg_ids]

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        gy = g[:, 0] * y
        dx = gy - y * np.add.reduceat(gy, starts)[seg_ids]
        return (dx[:, None],)

    return Tensor.from_op(y[:, None], "segment_softmax", (scores,), _backward)
