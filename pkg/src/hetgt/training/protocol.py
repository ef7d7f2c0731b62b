"""Repeated seeded runs summarised with trimmed statistics."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from hetgt.core.errors import ContractError
from hetgt.core.models.config import MIN_RUNS, ModelSpec, TrainConfig
from hetgt.core.models.results import RunResult, Stat, Summary, Timing
from hetgt.graph.hetero_graph import HeteroGraph
from hetgt.tensor.tensor import set_precision
from hetgt.training.metrics import trimmed_stats
from hetgt.training.trainer import TrainedRun, fit

_log = logging.getLogger(__name__)


@dataclass
class MultiRunOutcome:
    runs: list[RunResult]
    summary: Summary
    timing: Timing
    best: TrainedRun | None


def _stat(values: list[float], trim_fraction: float) -> Stat | None:
    if not values:
        return None
    mean, std, kept = trimmed_stats(values, trim_fraction)
    return Stat(mean=mean, std=std, n=kept)


def summarize(label: str, runs: list[RunResult], trim_fraction: float) -> tuple[Summary, Timing]:
    """Trim each metric independently over the non-diverged runs."""
    ok = [r for r in runs if not r.diverged]
    macro = [r.test_macro_f1 for r in ok if r.test_macro_f1 is not None]
    micro = [r.test_micro_f1 for r in ok if r.test_micro_f1 is not None]
    summary = Summary(
        model=label,
        runs=len(runs),
        diverged=len(runs) - len(ok),
        trim_fraction=trim_fraction,
        macro_f1=_stat(macro, trim_fraction),
        micro_f1=_stat(micro, trim_fraction),
    )
    per_run = [r.ms_per_epoch for r in runs]
    timing = Timing(
        model=label,
        ms_per_epoch_mean=sum(per_run) / len(per_run) if per_run else 0.0,
        ms_per_epoch=per_run,
    )
    return summary, timing


def multi_run(
    spec: ModelSpec,
    graph: HeteroGraph,
    config: TrainConfig,
    n_runs: int,
    trim_fraction: float = 0.1,
    workers: int = 1,
) -> MultiRunOutcome:
    """Train *n_runs* models with seeds ``config.seed + i`` and summarise them.

    Runs may execute on *workers* threads over the shared immutable graph;
    results are ordered by seed before any statistic is taken.  The best
    single run (by validation criterion) is returned with its parameters.

    Raises:
        ContractError: If ``n_runs`` is below the minimum.
    """
    if n_runs < MIN_RUNS:
        raise ContractError(f"multi_run needs at least {MIN_RUNS} runs, got {n_runs}")
    set_precision(config.precision)
    seeds = [config.seed + i for i in range(n_runs)]
    _log.info("Starting %d runs of %s on %d worker(s)", n_runs, spec.label, workers)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="hetgt-run") as pool:
            trained = list(pool.map(lambda s: fit(spec, graph, config, s), seeds))
    else:
        trained = [fit(spec, graph, config, s) for s in seeds]
    trained.sort(key=lambda t: t.result.seed)

    runs = [t.result for t in trained]
    summary, timing = summarize(spec.label, runs, trim_fraction)
    scored = [t for t in trained if not t.result.diverged and t.best_score is not None]
    best = max(scored, key=lambda t: t.best_score or 0.0, default=None)
    if summary.macro_f1 is not None:
        _log.info(
            "%s: macro-F1 %.4f +/- %.4f, micro-F1 %.4f (%d diverged)",
            spec.label,
            summary.macro_f1.mean,
            summary.macro_f1.std,
            summary.micro_f1.mean if summary.micro_f1 else float("nan"),
            summary.diverged,
        )
    return MultiRunOutcome(runs=runs, summary=summary, timing=timing, best=best)
