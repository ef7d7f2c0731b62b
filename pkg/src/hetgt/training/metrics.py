"""Classification metrics and the trimmed multi-run statistics."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from sklearn.metrics import f1_score

from hetgt.core.errors import ContractError


def f1_scores(pred: np.ndarray, true: np.ndarray, num_classes: int | None = None) -> tuple[float, float]:
    """``(macro_f1, micro_f1)``; a class with no support and no predictions is skipped, 0/0 counts as 0.

    Raises:
        ContractError: If a label falls outside ``[0, num_classes)``.
    """
    pred = np.asarray(pred, dtype=np.int64)
    true = np.asarray(true, dtype=np.int64)
    if pred.shape != true.shape:
        raise ContractError(f"f1_scores: {pred.shape[0]} predictions for {true.shape[0]} labels")
    if true.size == 0:
        return 0.0, 0.0
    if num_classes is not None:
        for arr in (pred, true):
            if arr.min() < 0 or arr.max() >= num_classes:
                raise ContractError(f"f1_scores: label outside [0, {num_classes})")
    macro = f1_score(true, pred, average="macro", zero_division=0)
    micro = f1_score(true, pred, average="micro", zero_division=0)
    return float(macro), float(micro)


def trimmed_stats(values: Sequence[float], trim_fraction: float = 0.1) -> tuple[float, float, int]:
    """Mean and sample std after dropping ``floor(n * trim_fraction)`` values from each end.

    Returns:
        ``(mean, std, retained)``; ``std`` is 0 for a single retained value.

    Raises:
        ContractError: If nothing would remain.
    """
    if not 0 <= trim_fraction < 0.5:
        raise ContractError(f"trim_fraction must lie in [0, 0.5), got {trim_fraction}")
    arr = np.sort(np.asarray(values, dtype=np.float64))
    n = arr.size
    cut = math.floor(n * trim_fraction)
    kept = arr[cut : n - cut]
    if kept.size == 0:
        raise ContractError(f"trimmed_stats: {n} values leave nothing after trimming {cut} from each end")
    std = float(kept.std(ddof=1)) if kept.size > 1 else 0.0
    return float(kept.mean()), std, int(kept.size)
