"""Pydantic models: configuration, graph schema and result records."""

from hetgt.core.models.config import (
    ATTENTION_KINDS,
    MODEL_KINDS,
    TREE_KINDS,
    DatasetRef,
    DropoutConfig,
    ExperimentConfig,
    ModelSpec,
    SyntheticNodeType,
    SyntheticRelation,
    SyntheticSpec,
    SystemConfig,
    TrainConfig,
)
from hetgt.core.models.results import ResultsRow, ResultsTable, RunResult, Stat, Summary, Timing
from hetgt.core.models.schema import (
    DatasetManifest,
    EdgeType,
    EdgeTypeFiles,
    NodeType,
    NodeTypeFiles,
    Schema,
    Splits,
)

__all__ = [
    "ATTENTION_KINDS",
    "MODEL_KINDS",
    "TREE_KINDS",
    "DatasetManifest",
    "DatasetRef",
    "DropoutConfig",
    "EdgeType",
    "EdgeTypeFiles",
    "ExperimentConfig",
    "ModelSpec",
    "NodeType",
    "NodeTypeFiles",
    "ResultsRow",
    "ResultsTable",
    "RunResult",
    "Schema",
    "Splits",
    "Stat",
    "Summary",
    "SyntheticNodeType",
    "SyntheticRelation",
    "SyntheticSpec",
    "SystemConfig",
    "Timing",
    "TrainConfig",
]
