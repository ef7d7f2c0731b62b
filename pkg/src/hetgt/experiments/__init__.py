"""Experiment commands: train, depth sweep, ablation, synthetic data, gradient check."""

from hetgt.experiments.commands import (
    ablation_specs,
    cmd_ablation,
    cmd_depth_sweep,
    cmd_gen_synthetic,
    cmd_gradcheck,
    cmd_train,
    load_graph,
    read_runs,
    write_table,
)
from hetgt.experiments.gradcheck import (
    GRADCHECK_TOLERANCE,
    CheckOutcome,
    CheckTarget,
    model_targets,
    op_targets,
    run_gradchecks,
)

__all__ = [
    "GRADCHECK_TOLERANCE",
    "CheckOutcome",
    "CheckTarget",
    "ablation_specs",
    "cmd_ablation",
    "cmd_depth_sweep",
    "cmd_gen_synthetic",
    "cmd_gradcheck",
    "cmd_train",
    "load_graph",
    "model_targets",
    "op_targets",
    "read_runs",
    "run_gradchecks",
    "write_table",
]
