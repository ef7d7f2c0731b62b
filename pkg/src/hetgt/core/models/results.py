"""Result records written by the experiment commands."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator


class RunResult(BaseModel):
    """One seeded training run (one line of ``runs.jsonl``).

    A diverged run keeps its trace up to the failure, sets ``diverged`` and
    leaves the test metrics as ``None``.
    """

    model_config = ConfigDict(extra="forbid")

    seed: int
    model: str = Field(description="ModelSpec label, e.g. 'HetGTAN/semantic/L2'")
    best_epoch: int = Field(ge=0)
    epochs_run: int = Field(ge=0)
    train_loss: list[float] = Field(default_factory=list)
    val_loss: list[float] = Field(default_factory=list)
    val_macro_f1: list[float] = Field(default_factory=list)
    test_macro_f1: float | None = Field(default=None, ge=0, le=1)
    test_micro_f1: float | None = Field(default=None, ge=0, le=1)
    ms_per_epoch: float = Field(default=0.0, ge=0)
    diverged: bool = False
    error: str | None = None

    @model_validator(mode="after")
    def _check(self) -> RunResult:
        if self.best_epoch > self.epochs_run:
            raise ValueError(f"best_epoch {self.best_epoch} exceeds epochs_run {self.epochs_run}")
        if len(self.train_loss) != self.epochs_run:
            raise ValueError("train_loss must have one entry per epoch run")
        return self


class Stat(BaseModel):
    """Trimmed mean and sample standard deviation."""

    model_config = ConfigDict(extra="forbid")

    mean: float
    std: float = Field(ge=0)
    n: int = Field(ge=0, description="Values retained after trimming")


class Summary(BaseModel):
    """Trimmed statistics over the runs of one model configuration."""

    model_config = ConfigDict(extra="forbid")

    model: str
    runs: int = Field(ge=0)
    diverged: int = Field(default=0, ge=0)
    trim_fraction: float = Field(ge=0, lt=0.5)
    macro_f1: Stat | None = None
    micro_f1: Stat | None = None


class Timing(BaseModel):
    """Wall-clock measurements kept apart from the deterministic summary."""

    model_config = ConfigDict(extra="forbid")

    model: str
    ms_per_epoch_mean: float = Field(ge=0)
    ms_per_epoch: list[float] = Field(default_factory=list)


class ResultsRow(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str
    depth: int = Field(ge=1)
    aggregator: str
    runs: int = Field(ge=0)
    macro_f1_mean: float | None = None
    macro_f1_std: float | None = None
    micro_f1_mean: float | None = None
    micro_f1_std: float | None = None
    ms_per_epoch: float | None = None


class ResultsTable(BaseModel):
    """One row per requested grid cell (depth sweep or ablation)."""

    model_config = ConfigDict(extra="forbid")

    experiment: str = Field(description="'depth-sweep' or 'ablation'")
    rows: list[ResultsRow] = Field(default_factory=list)

    @staticmethod
    def csv_header() -> list[str]:
        return list(ResultsRow.model_fields)
