"""Full-batch training of one seeded run with early stopping."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from hetgt.core.errors import ContractError, NumericalError
from hetgt.core.models.config import ModelSpec, TrainConfig
from hetgt.core.models.results import RunResult
from hetgt.graph.hetero_graph import HeteroGraph
from hetgt.log_config.logger import ContextualLogger, get_logger
from hetgt.nn.models import forward
from hetgt.nn.params import ModelParams, init_params
from hetgt.tensor.tensor import backward, get_precision, set_precision
from hetgt.training.evaluate import evaluate
from hetgt.training.loss import cross_entropy_loss
from hetgt.training.optimizer import AdamState, adam_step

_log = get_logger(__name__)


@dataclass
class TrainedRun:
    """A run's record plus its restored best parameters."""

    result: RunResult
    params: ModelParams
    best_score: float | None = None


def _mean_ms(epoch_ms: list[float], warmup: int) -> float:
    if not epoch_ms:
        return 0.0
    steady = epoch_ms[warmup:] or epoch_ms
    return float(np.mean(steady))


def fit(spec: ModelSpec, graph: HeteroGraph, config: TrainConfig, seed: int | None = None) -> TrainedRun:
    """Train one model and keep its best-validation parameters.

    Each epoch runs forward in train mode, the train-split loss, backward
    and one Adam step, then scores the validation split in eval mode.  A
    run stops once the criterion has failed to improve for more than
    ``patience`` consecutive epochs.  Without a validation split the
    train loss is the criterion.  Divergence is recorded, not raised.

    Raises:
        ContractError: If the train split is empty.
    """
    seed = config.seed if seed is None else seed
    log = ContextualLogger(_log, model=spec.kind, seed=seed)
    if get_precision() != config.precision:
        set_precision(config.precision)

    train_idx = graph.splits["train"]
    val_idx = graph.splits["val"]
    test_idx = graph.splits["test"]
    if train_idx.size == 0:
        raise ContractError("training needs a non-empty train split")
    by_f1 = config.early_stopping == "val_macro_f1" and val_idx.size > 0

    params = init_params(spec, graph.schema, seed)
    dropout_rng = np.random.default_rng([seed, 1])
    state = AdamState()

    train_trace: list[float] = []
    val_trace: list[float] = []
    f1_trace: list[float] = []
    epoch_ms: list[float] = []
    best_score = -np.inf
    best_epoch = 0
    best_snapshot = params.snapshot()
    bad_epochs = 0
    error: str | None = None

    log.info("Training %s for up to %d epochs", spec.label, config.max_epochs)
    try:
        for epoch in range(1, config.max_epochs + 1):
            start = time.perf_counter()
            params.zero_grad()
            logits = forward(spec, params, graph, "train", dropout_rng)
            loss = cross_entropy_loss(logits, graph.labels, train_idx)
            backward(loss)
            grads = {name: t.grad_or_zeros() for name, t in params.items()}
            adam_step(params.tensors, grads, state, config.lr, config.weight_decay)
            if not params.all_finite():
                raise NumericalError("Non-finite parameter after update", op="adam_step")
            epoch_ms.append((time.perf_counter() - start) * 1000.0)

            train_loss = loss.item()
            if val_idx.size:
                ev = evaluate(spec, params, graph, val_idx)
                assert ev.loss is not None
                val_trace.append(ev.loss)
                f1_trace.append(ev.macro_f1)
                score = ev.macro_f1 if by_f1 else -ev.loss
            else:
                score = -train_loss
            train_trace.append(train_loss)
            log.debug("epoch %d train_loss=%.5f criterion=%.5f", epoch, train_loss, score)

            if score > best_score:
                best_score, best_epoch, bad_epochs = score, epoch, 0
                best_snapshot = params.snapshot()
            else:
                bad_epochs += 1
                if bad_epochs > config.patience:
                    log.info("Early stop at epoch %d (best epoch %d)", epoch, best_epoch)
                    break
    except NumericalError as exc:
        error = str(exc)
        log.warning("Run diverged after %d epochs: %s", len(train_trace), error)

    params.restore(best_snapshot)
    result = RunResult(
        seed=seed,
        model=spec.label,
        best_epoch=best_epoch,
        epochs_run=len(train_trace),
        train_loss=train_trace,
        val_loss=val_trace[: len(train_trace)],
        val_macro_f1=f1_trace[: len(train_trace)],
        ms_per_epoch=_mean_ms(epoch_ms[: len(train_trace)], config.warmup_epochs),
        diverged=error is not None,
        error=error,
    )
    if error is None and test_idx.size:
        test = evaluate(spec, params, graph, test_idx)
        result.test_macro_f1, result.test_micro_f1 = test.macro_f1, test.micro_f1
        log.info("Test macro-F1 %.4f micro-F1 %.4f (best epoch %d)", test.macro_f1, test.micro_f1, best_epoch)
    return TrainedRun(result=result, params=params, best_score=None if best_epoch == 0 else float(best_score))


def train(spec: ModelSpec, graph: HeteroGraph, config: TrainConfig, seed: int | None = None) -> RunResult:
    """:func:`fit` returning only the :class:`RunResult`."""
    return fit(spec, graph, config, seed).result
