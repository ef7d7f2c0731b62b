"""Loss, optimizer, metrics, single-run training and the multi-run protocol."""

from hetgt.training.evaluate import Evaluation, evaluate
from hetgt.training.loss import cross_entropy_loss
from hetgt.training.metrics import f1_scores, trimmed_stats
from hetgt.training.optimizer import AdamState, adam_step
from hetgt.training.protocol import MultiRunOutcome, multi_run, summarize
from hetgt.training.trainer import TrainedRun, fit, train

__all__ = [
    "AdamState",
    "Evaluation",
    "MultiRunOutcome",
    "TrainedRun",
    "adam_step",
    "cross_entropy_loss",
    "evaluate",
    "f1_scores",
    "fit",
    "multi_run",
    "summarize",
    "train",
    "trimmed_stats",
]
