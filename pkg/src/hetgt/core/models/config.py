"""Configuration Pydantic models: ExperimentConfig and its sections."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hetgt.tensor.ops import ACTIVATIONS

ModelKind = Literal["HetGTCN", "HetGTAN", "HetGTAN_ns", "HetGCN", "HetGAT"]
Aggregator = Literal["semantic", "mean", "weighted_sum", "none"]
Precision = Literal["f32", "f64"]

MODEL_KINDS: tuple[str, ...] = ("HetGTCN", "HetGTAN", "HetGTAN_ns", "HetGCN", "HetGAT")
TREE_KINDS: frozenset[str] = frozenset({"HetGTCN", "HetGTAN", "HetGTAN_ns"})
ATTENTION_KINDS: frozenset[str] = frozenset({"HetGTAN", "HetGTAN_ns", "HetGAT"})
MIN_RUNS = 5


class SystemConfig(BaseModel):
    """Process-level runtime settings."""

    model_config = ConfigDict(extra="forbid")

    log_level: str = Field(default="INFO", description="Root log level")
    log_dir: str | None = Field(default="logs", description="Directory for rotating log files; null = console only")
    threads: int = Field(default=1, ge=1, description="BLAS threads and parallel run workers")


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------


class DropoutConfig(BaseModel):
    """Dropout rates; all in ``[0, 1)``."""

    model_config = ConfigDict(extra="forbid")

    projection: float = Field(default=0.5, ge=0, lt=1, description="Dropout on projected features Z")
    layer: float = Field(default=0.5, ge=0, lt=1, description="Dropout after each intermediate layer")
    attention: float = Field(default=0.0, ge=0, lt=1, description="Dropout on attention weights (GAT/GTAN)")


class ModelSpec(BaseModel):
    """Which model to build and how wide/deep it is.

    ``HetGTAN_ns`` sums edge-type messages inside one ELU, so it has no
    aggregator; its ``aggregator`` is forced to ``"none"``.  Every other
    kind needs a real aggregator.
    """

    model_config = ConfigDict(extra="forbid")

    kind: ModelKind = Field(default="HetGTCN", description="Model family")
    depth: int = Field(default=2, ge=1, description="Number of propagation layers L")
    hidden: int = Field(default=64, ge=1, description="Hidden width f, constant across layers")
    semantic_hidden: int = Field(default=128, ge=1, description="Semantic attention width f'")
    aggregator: Aggregator = Field(default="semantic", description="Per-node-type edge-type combiner")
    dropout: DropoutConfig = Field(default_factory=DropoutConfig)
    projection_activation: str = Field(default="elu", description="Nonlinearity of the node-type projection")
    attention_slope: float = Field(default=0.2, ge=0, description="LeakyReLU slope for attention scores")

    @model_validator(mode="before")
    @classmethod
    def _force_ns_aggregator(cls, data: object) -> object:
        if isinstance(data, dict) and data.get("kind") == "HetGTAN_ns":
            return {**data, "aggregator": "none"}
        return data

    @model_validator(mode="after")
    def _check(self) -> ModelSpec:
        if self.kind != "HetGTAN_ns" and self.aggregator == "none":
            raise ValueError(f"aggregator 'none' is only valid for HetGTAN_ns, not {self.kind}")
        if self.projection_activation not in ACTIVATIONS:
            raise ValueError(f"projection_activation must be one of {ACTIVATIONS}")
        return self

    @property
    def label(self) -> str:
        """Short row label, e.g. ``HetGTAN/semantic/L5``."""
        if self.kind == "HetGTAN_ns":
            return f"{self.kind}/L{self.depth}"
        return f"{self.kind}/{self.aggregator}/L{self.depth}"


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


class TrainConfig(BaseModel):
    """Optimizer, stopping and precision settings of one run."""

    model_config = ConfigDict(extra="forbid")

    lr: float = Field(default=0.005, gt=0, description="Adam learning rate")
    weight_decay: float = Field(default=0.0, ge=0, description="L2 coefficient added to gradients")
    max_epochs: int = Field(default=500, ge=1)
    patience: int = Field(default=100, ge=0, description="Epochs without improvement tolerated")
    seed: int = Field(default=0, ge=0, description="Base seed; run i uses seed + i")
    precision: Precision = Field(default="f32")
    early_stopping: Literal["val_loss", "val_macro_f1"] = Field(default="val_loss")
    warmup_epochs: int = Field(default=5, ge=0, description="Epochs excluded from ms/epoch")

    @model_validator(mode="after")
    def _check(self) -> TrainConfig:
        if self.patience > self.max_epochs:
            raise ValueError(f"patience ({self.patience}) must not exceed max_epochs ({self.max_epochs})")
        return self


# ---------------------------------------------------------------------------
# Data
# ---------------------------------------------------------------------------


class SyntheticNodeType(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    count: int = Field(ge=1)


class SyntheticRelation(BaseModel):
    """A generated relation ``src -> dst`` with an expected in-degree at ``dst``."""

    model_config = ConfigDict(extra="forbid")

    src: str
    dst: str
    degree: float = Field(default=3.0, gt=0, description="Expected incoming edges per dst node")


class SyntheticSpec(BaseModel):
    """Desk-scale random heterogeneous graph.

    Relations produce edge type ``"{src}-{dst}"``; with ``add_reverse``
    each also produces its reverse ``"{dst}-{src}"``.
    """

    model_config = ConfigDict(extra="forbid")

    node_types: list[SyntheticNodeType] = Field(min_length=1)
    relations: list[SyntheticRelation] = Field(default_factory=list)
    add_reverse: bool = Field(default=True)
    target_type: str
    feature_dim: int = Field(default=16, ge=1)
    num_classes: int = Field(default=3, ge=1)
    signal_strength: float = Field(default=4.0, ge=0, description="Separation of class means on target features")
    homophily: float = Field(default=0.8, ge=0, le=1, description="Share of target-target links within a class")
    train_fraction: float = Field(default=0.2, gt=0, lt=1)
    val_fraction: float = Field(default=0.1, ge=0, lt=1)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check(self) -> SyntheticSpec:
        names = [n.name for n in self.node_types]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate node type names: {names}")
        if self.target_type not in names:
            raise ValueError(f"target_type {self.target_type!r} is not a declared node type")
        for r in self.relations:
            if r.src not in names or r.dst not in names:
                raise ValueError(f"relation {r.src}-{r.dst} references an undeclared node type")
        edge_names = self.edge_type_names()
        if len(set(edge_names)) != len(edge_names):
            raise ValueError(f"relations produce duplicate edge types: {edge_names}")
        if self.num_classes > self.feature_dim:
            raise ValueError(
                f"num_classes ({self.num_classes}) exceeds feature_dim ({self.feature_dim}); each class needs its own signal axis"
            )
        if self.train_fraction + self.val_fraction >= 1:
            raise ValueError("train_fraction + val_fraction must leave room for a test split")
        return self

    def edge_type_names(self) -> list[str]:
        out: list[str] = []
        for r in self.relations:
            out.append(f"{r.src}-{r.dst}")
            if self.add_reverse:
                out.append(f"{r.dst}-{r.src}")
        return out

    def count_of(self, name: str) -> int:
        return next(n.count for n in self.node_types if n.name == name)


class DatasetRef(BaseModel):
    """Pointer to an on-disk dataset directory (``manifest.json`` inside)."""

    model_config = ConfigDict(extra="forbid")

    path: str = Field(description="Dataset directory; relative paths resolve against the config file")


# ---------------------------------------------------------------------------
# Top level
# ---------------------------------------------------------------------------


class ExperimentConfig(BaseModel):
    """Top-level configuration loaded from ``hetgt_config.json``."""

    model_config = ConfigDict(extra="forbid")

    system: SystemConfig = Field(default_factory=SystemConfig)
    dataset: DatasetRef | None = Field(default=None)
    synthetic: SyntheticSpec | None = Field(default=None)
    model: ModelSpec = Field(default_factory=ModelSpec)
    train: TrainConfig = Field(default_factory=TrainConfig)
    runs: int = Field(default=10, ge=MIN_RUNS, description="Seeded runs per grid cell")
    trim_fraction: float = Field(default=0.1, ge=0, lt=0.5, description="Share dropped from each end")
    output_dir: str = Field(default="results")
    preset: Literal["acm", "imdb", "dblp"] | None = Field(
        default=None, description="Published hyperparameters; explicit values win"
    )
    depths: list[int] = Field(default_factory=lambda: [2, 5, 10, 20], min_length=1, description="depth-sweep grid")
    ablation_depth: int = Field(default=5, ge=1)

    @model_validator(mode="after")
    def _check_source(self) -> ExperimentConfig:
        if (self.dataset is None) == (self.synthetic is None):
            raise ValueError("exactly one of 'dataset' or 'synthetic' must be given")
        if any(d < 1 for d in self.depths):
            raise ValueError("depths must all be >= 1")
        return self
