"""Dense reverse-mode differentiation plus sparse and segmented kernels."""

from hetgt.tensor.gradcheck import grad_check, relative_error
from hetgt.tensor.ops import (
    ACTIVATIONS,
    activation,
    add,
    concat_rows,
    constant,
    dropout,
    gather_rows,
    matmul,
    mean_rows,
    mul,
    scatter_rows,
    slice_rows,
    softmax_cross_entropy,
    sub,
    sum_all,
)
from hetgt.tensor.sparse import (
    SegmentIndex,
    SparseAdjacency,
    segment_softmax,
    spmm,
    weighted_spmm,
)
from hetgt.tensor.tensor import (
    Tape,
    Tensor,
    backward,
    get_dtype,
    get_precision,
    inject_backward_fault,
    precision,
    set_precision,
)

__all__ = [
    "ACTIVATIONS",
    "SegmentIndex",
    "SparseAdjacency",
    "Tape",
    "Tensor",
    "activation",
    "add",
    "backward",
    "concat_rows",
    "constant",
    "dropout",
    "gather_rows",
    "get_dtype",
    "get_precision",
    "grad_check",
    "inject_backward_fault",
    "matmul",
    "mean_rows",
    "mul",
    "precision",
    "relative_error",
    "scatter_rows",
    "segment_softmax",
    "set_precision",
    "slice_rows",
    "softmax_cross_entropy",
    "spmm",
    "sub",
    "sum_all",
    "weighted_spmm",
]
