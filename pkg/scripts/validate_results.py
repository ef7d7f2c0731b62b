#!/usr/bin/env python3
"""Validate an experiment output directory against the result models.

Usage:
    python scripts/validate_results.py RESULTS_DIR

Checks performed:
  - ``runs.jsonl``: every line parses as a ``RunResult``
  - ``summary.json`` / ``timing.json``: parse as ``Summary`` / ``Timing``
    and agree with ``runs.jsonl`` on the run count
  - ``config.json``: parses as an ``ExperimentConfig``
  - ``best.ckpt``: loads as a checkpoint
  - Every other ``*.json`` is a ``ResultsTable`` whose sibling ``*.csv`` has
    the table header and the same rows

Exit code: 0 if all checks pass, 1 otherwise.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

# Resolve project root (script lives in scripts/, project root is parent)
PROJECT_ROOT = Path(__file__).resolve().parent.parent
SRC_DIR = PROJECT_ROOT / "src"

# Ensure src/ is on sys.path so hetgt.* imports work
sys.path.insert(0, str(SRC_DIR))

from hetgt.core.models.config import ExperimentConfig  # noqa: E402
from hetgt.core.models.results import ResultsRow, ResultsTable, RunResult, Summary, Timing  # noqa: E402
from hetgt.nn.params import load_checkpoint  # noqa: E402

# ---------------------------------------------------------------------------
# Colour helpers (ANSI)
# ---------------------------------------------------------------------------
_GREEN = "\033[92m"
_RED = "\033[91m"
_BOLD = "\033[1m"
_RESET = "\033[0m"

_CHECK = "[OK]"
_CROSS = "[FAIL]"

_FIXED_FILES = {"summary.json", "timing.json", "config.json"}


def _pass(msg: str) -> None:
    print(f"  {_GREEN}{_CHECK}{_RESET} {msg}")


def _fail(msg: str) -> None:
    print(f"  {_RED}{_CROSS}{_RESET} {msg}")


# ---------------------------------------------------------------------------
# Validators
# ---------------------------------------------------------------------------
def _check_runs(path: Path) -> int | None:
    """Return the number of valid runs, or None on failure."""
    count = 0
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            RunResult.model_validate_json(line)
        except Exception as exc:
            _fail(f"{path.name} line {lineno}: {exc}")
            return None
        count += 1
    _pass(f"{path.name}: {count} runs")
    return count


def _check_model(path: Path, model: type, label: str):
    try:
        obj = model.model_validate_json(path.read_text(encoding="utf-8"))
    except Exception as exc:
        _fail(f"{path.name}: not a valid {label}: {exc}")
        return None
    _pass(f"{path.name} valid {label}")
    return obj


def _check_table(path: Path) -> bool:
    table = _check_model(path, ResultsTable, "ResultsTable")
    if table is None:
        return False
    csv_path = path.with_suffix(".csv")
    if not csv_path.is_file():
        _fail(f"{csv_path.name} missing")
        return False
    with csv_path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        rows = list(reader)
    if header != ResultsTable.csv_header():
        _fail(f"{csv_path.name}: header {header} != {ResultsTable.csv_header()}")
        return False
    try:
        parsed = [ResultsRow.model_validate({k: (v if v != "" else None) for k, v in r.items()}) for r in rows]
    except Exception as exc:
        _fail(f"{csv_path.name}: invalid row: {exc}")
        return False
    if len(parsed) != len(table.rows):
        _fail(f"{csv_path.name}: {len(parsed)} rows, {path.name} has {len(table.rows)}")
        return False
    _pass(f"{csv_path.name}: {len(parsed)} rows match {path.name}")
    return True


def validate_dir(results_dir: Path) -> bool:
    """Run all checks on *results_dir*.  Returns True if everything passes."""
    if not results_dir.is_dir():
        print(f"{_RED}ERROR: results directory not found: {results_dir}{_RESET}")
        return False

    print(f"\n{_BOLD}Validating {results_dir}{_RESET}\n")
    all_ok = True
    checked = 0

    runs_path = results_dir / "runs.jsonl"
    n_runs: int | None = None
    if runs_path.is_file():
        checked += 1
        n_runs = _check_runs(runs_path)
        all_ok &= n_runs is not None

    for name, model in (("summary.json", Summary), ("timing.json", Timing)):
        path = results_dir / name
        if not path.is_file():
            continue
        checked += 1
        obj = _check_model(path, model, model.__name__)
        if obj is None:
            all_ok = False
            continue
        count = obj.runs if isinstance(obj, Summary) else len(obj.ms_per_epoch)
        if n_runs is not None and count != n_runs:
            _fail(f"{name}: {count} runs, runs.jsonl has {n_runs}")
            all_ok = False

    config_path = results_dir / "config.json"
    if config_path.is_file():
        checked += 1
        all_ok &= _check_model(config_path, ExperimentConfig, "ExperimentConfig") is not None

    ckpt = results_dir / "best.ckpt"
    if ckpt.is_file():
        checked += 1
        try:
            params, metadata = load_checkpoint(ckpt)
            _pass(f"best.ckpt: {len(params.names())} tensors, seed {metadata.get('seed')}")
        except Exception as exc:
            _fail(f"best.ckpt: {exc}")
            all_ok = False

    for path in sorted(results_dir.glob("*.json")):
        if path.name in _FIXED_FILES:
            continue
        checked += 1
        try:
            json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            _fail(f"{path.name}: invalid JSON: {exc}")
            all_ok = False
            continue
        all_ok &= _check_table(path)

    if checked == 0:
        _fail("no result files found")
        return False
    return all_ok


if __name__ == "__main__":
    if len(sys.argv) != 2:
        print(__doc__)
        sys.exit(1)
    ok = validate_dir(Path(sys.argv[1]))
    if ok:
        print(f"\n{_GREEN}{_BOLD}All checks passed{_RESET}\n")
        sys.exit(0)
    else:
        print(f"\n{_RED}{_BOLD}Some checks failed{_RESET}\n")
        sys.exit(1)
