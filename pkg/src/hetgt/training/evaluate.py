"""Eval-mode loss, predictions and F1 on one split."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hetgt.core.models.config import ModelSpec
from hetgt.graph.hetero_graph import HeteroGraph
from hetgt.nn.models import forward
from hetgt.nn.params import ModelParams
from hetgt.training.loss import cross_entropy_loss
from hetgt.training.metrics import f1_scores


@dataclass(frozen=True)
class Evaluation:
    loss: float | None
    predictions: np.ndarray
    macro_f1: float
    micro_f1: float


def evaluate(spec: ModelSpec, params: ModelParams, graph: HeteroGraph, index: np.ndarray) -> Evaluation:
    """Score target-type nodes *index* (local ids) in eval mode.

    An empty *index* yields ``loss=None`` and zero F1.
    """
    idx = np.asarray(index, dtype=np.int64)
    logits = forward(spec, params, graph, "eval")
    preds = logits.data[idx].argmax(axis=1) if idx.size else np.empty(0, dtype=np.int64)
    loss = cross_entropy_loss(logits, graph.labels, idx).item() if idx.size else None
    macro, micro = f1_scores(preds, graph.labels[idx], graph.schema.num_classes)
    return Evaluation(loss=loss, predictions=preds, macro_f1=macro, micro_f1=micro)
