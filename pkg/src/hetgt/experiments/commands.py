"""Experiment commands behind the ``hetgt`` subcommands.

Each command takes a validated :class:`ExperimentConfig`, loads or
generates its graph *before* touching the output directory, and writes
its results atomically.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from hetgt.config.config_manager import atomic_write_json, atomic_write_text, read_json, save_config, validate_model
from hetgt.core.errors import ConfigError, DataError, GradCheckError, NumericalError
from hetgt.core.models.config import TREE_KINDS, ExperimentConfig, ModelSpec, SyntheticSpec
from hetgt.core.models.results import ResultsRow, ResultsTable, RunResult, Summary
from hetgt.experiments.gradcheck import GRADCHECK_TOLERANCE, CheckOutcome, run_gradchecks
from hetgt.graph.dataset_io import load_dataset, write_dataset
from hetgt.graph.hetero_graph import HeteroGraph
from hetgt.graph.synthetic import generate_synthetic
from hetgt.log_config.logger import log_duration
from hetgt.nn.params import save_checkpoint
from hetgt.tensor.tensor import inject_backward_fault
from hetgt.training.protocol import MultiRunOutcome, multi_run

_log = logging.getLogger(__name__)

RUNS_FILE = "runs.jsonl"
SUMMARY_FILE = "summary.json"
TIMING_FILE = "timing.json"
CHECKPOINT_FILE = "best.ckpt"
CONFIG_COPY_FILE = "config.json"

# Aggregator grid of the ablation; "ns" is the HetGTAN_ns row.
ABLATION_AGGREGATORS = ("semantic", "mean", "weighted_sum")


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------
def load_graph(config: ExperimentConfig) -> HeteroGraph:
    """The experiment graph: a dataset directory or a generated synthetic one."""
    if config.dataset is not None:
        graph = load_dataset(config.dataset.path)
    elif config.synthetic is not None:
        graph = generate_synthetic(config.synthetic)
    else:
        raise ConfigError("config names neither a dataset nor a synthetic spec")
    _log.info("Graph: %s", graph.summary())
    return graph


def _jsonl(records: Sequence[BaseModel]) -> str:
    return "".join(json.dumps(r.model_dump(mode="json")) + "\n" for r in records)


def _csv_text(fieldnames: list[str], rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def write_table(table: ResultsTable, out_dir: Path, stem: str) -> tuple[Path, Path]:
    """Write *table* as ``{stem}.json`` and ``{stem}.csv``."""
    json_path = out_dir / f"{stem}.json"
    csv_path = out_dir / f"{stem}.csv"
    atomic_write_json(json_path, table.model_dump(mode="json"))
    rows = [row.model_dump(mode="json") for row in table.rows]
    atomic_write_text(csv_path, _csv_text(ResultsTable.csv_header(), rows))
    _log.info("Wrote %s and %s (%d rows)", json_path, csv_path, len(table.rows))
    return json_path, csv_path


def _row(spec: ModelSpec, aggregator: str, outcome: MultiRunOutcome) -> ResultsRow:
    s = outcome.summary
    return ResultsRow(
        kind=spec.kind,
        depth=spec.depth,
        aggregator=aggregator,
        runs=s.runs,
        macro_f1_mean=s.macro_f1.mean if s.macro_f1 else None,
        macro_f1_std=s.macro_f1.std if s.macro_f1 else None,
        micro_f1_mean=s.micro_f1.mean if s.micro_f1 else None,
        micro_f1_std=s.micro_f1.std if s.micro_f1 else None,
        ms_per_epoch=outcome.timing.ms_per_epoch_mean,
    )


def _run_cell(config: ExperimentConfig, graph: HeteroGraph, spec: ModelSpec) -> MultiRunOutcome:
    return multi_run(
        spec,
        graph,
        config.train,
        config.runs,
        trim_fraction=config.trim_fraction,
        workers=config.system.threads,
    )


def _respec(spec: ModelSpec, **changes: Any) -> ModelSpec:
    return validate_model(ModelSpec, {**spec.model_dump(), **changes})


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------
def cmd_train(config: ExperimentConfig) -> Summary:
    """Run the configured model ``config.runs`` times and write its results.

    Writes ``runs.jsonl``, ``summary.json``, ``timing.json``, the best
    run's ``best.ckpt`` and a copy of the effective config.

    Raises:
        DataError: If the dataset cannot be loaded (nothing is written).
        NumericalError: If every run diverged (results are still written).
    """
    graph = load_graph(config)
    spec = config.model
    with log_duration(_log, f"train {spec.label}"):
        outcome = _run_cell(config, graph, spec)

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out / RUNS_FILE, _jsonl(outcome.runs))
    atomic_write_json(out / SUMMARY_FILE, outcome.summary.model_dump(mode="json"))
    atomic_write_json(out / TIMING_FILE, outcome.timing.model_dump(mode="json"))
    save_config(config, out / CONFIG_COPY_FILE)
    if outcome.best is not None:
        best = outcome.best.result
        save_checkpoint(
            out / CHECKPOINT_FILE,
            outcome.best.params,
            {"model": spec.model_dump(mode="json"), "seed": best.seed, "best_epoch": best.best_epoch},
        )
    _log.info("Summary written to %s", out / SUMMARY_FILE)

    if outcome.summary.diverged == outcome.summary.runs:
        raise NumericalError(f"all {outcome.summary.runs} runs diverged; see {out / RUNS_FILE}")
    return outcome.summary


# ---------------------------------------------------------------------------
# depth-sweep
# ---------------------------------------------------------------------------
def cmd_depth_sweep(config: ExperimentConfig, depths: list[int] | None = None) -> ResultsTable:
    """One table row per depth for the configured model."""
    grid = list(depths) if depths is not None else list(config.depths)
    if not grid:
        raise ConfigError("depth sweep needs at least one depth")
    graph = load_graph(config)
    table = ResultsTable(experiment="depth-sweep")
    for depth in grid:
        spec = _respec(config.model, depth=depth)
        with log_duration(_log, f"depth sweep cell {spec.label}"):
            outcome = _run_cell(config, graph, spec)
        table.rows.append(_row(spec, spec.aggregator, outcome))

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_table(table, out, "depth_sweep")
    return table


# ---------------------------------------------------------------------------
# ablation
# ---------------------------------------------------------------------------
def ablation_specs(spec: ModelSpec, depth: int) -> list[tuple[str, ModelSpec]]:
    """``(row aggregator, spec)`` pairs of the aggregator ablation.

    HetGTCN gets the three aggregators; HetGTAN (and HetGTAN_ns, ablated
    as its attention family) additionally gets the ``ns`` row.

    Raises:
        ConfigError: If *spec* is not a tree model.
    """
    if spec.kind not in TREE_KINDS:
        raise ConfigError(f"ablation needs a tree model (one of {sorted(TREE_KINDS)}), got {spec.kind!r}")
    base = "HetGTCN" if spec.kind == "HetGTCN" else "HetGTAN"
    cells = [(agg, _respec(spec, kind=base, aggregator=agg, depth=depth)) for agg in ABLATION_AGGREGATORS]
    if base == "HetGTAN":
        cells.append(("ns", _respec(spec, kind="HetGTAN_ns", depth=depth)))
    return cells


def cmd_ablation(config: ExperimentConfig) -> ResultsTable:
    """Aggregator ablation of the configured tree model at ``ablation_depth``."""
    cells = ablation_specs(config.model, config.ablation_depth)
    graph = load_graph(config)
    table = ResultsTable(experiment="ablation")
    for aggregator, spec in cells:
        with log_duration(_log, f"ablation cell {spec.label}"):
            outcome = _run_cell(config, graph, spec)
        table.rows.append(_row(spec, aggregator, outcome))

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_table(table, out, "ablation")
    return table


# ---------------------------------------------------------------------------
# gen-synthetic
# ---------------------------------------------------------------------------
def cmd_gen_synthetic(spec_path: Path | str, out_dir: Path | str) -> Path:
    """Generate a synthetic graph from a JSON spec file and write it as a dataset."""
    path = Path(spec_path)
    raw, text = read_json(path)
    spec = validate_model(SyntheticSpec, raw, path=str(path), text=text)
    graph = generate_synthetic(spec)
    try:
        directory = write_dataset(graph, out_dir)
    except OSError as exc:
        raise DataError(f"cannot write dataset: {exc.strerror}", file=str(out_dir)) from None
    _log.info("Synthetic dataset written to %s", directory)
    return directory


# ---------------------------------------------------------------------------
# gradcheck
# ---------------------------------------------------------------------------
def cmd_gradcheck(corrupt_op: str | None = None) -> list[CheckOutcome]:
    """Gradient-check every op and model kind, printing one line per target.

    Args:
        corrupt_op: Scale this op's backward rule to exercise the failure path.

    Raises:
        GradCheckError: If any target's error reaches the tolerance.
    """
    if corrupt_op is not None:
        with inject_backward_fault(corrupt_op, 1.5):
            outcomes = run_gradchecks()
    else:
        outcomes = run_gradchecks()

    width = max(len(o.name) for o in outcomes)
    for o in outcomes:
        print(f"{'OK  ' if o.passed else 'FAIL'} {o.name:<{width}}  max_rel_err={o.max_error:.3e}")
    failed = [o.name for o in outcomes if not o.passed]
    if failed:
        raise GradCheckError(f"{len(failed)} target(s) at or above {GRADCHECK_TOLERANCE:g}: {', '.join(failed)}")
    _log.info("Gradient check passed for %d targets", len(outcomes))
    return outcomes


def read_runs(path: Path | str) -> list[RunResult]:
    """Parse a ``runs.jsonl`` file."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [RunResult.model_validate_json(line) for line in lines if line.strip()]
