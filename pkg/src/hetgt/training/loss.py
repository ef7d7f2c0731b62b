"""Training objective."""

from __future__ import annotations

import numpy as np

from hetgt.tensor.ops import softmax_cross_entropy
from hetgt.tensor.tensor import Tensor


def cross_entropy_loss(logits: Tensor, labels: np.ndarray, index: np.ndarray) -> Tensor:
    """Mean ``-log softmax(logits)[label]`` over the rows in *index* (1x1).

    Raises:
        ContractError: If *index* is empty.
    """
    return softmax_cross_entropy(logits, labels, index)
