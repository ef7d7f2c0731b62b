"""Heterogeneous graph schema and on-disk dataset manifest models."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, model_validator


class NodeType(BaseModel):
    """One node type: its name, node count and raw feature width."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(min_length=1, description="Unique node type name, e.g. 'P'")
    count: int = Field(ge=1, description="Number of nodes of this type")
    feature_dim: int = Field(ge=1, description="Raw feature width d_a")


class EdgeType(BaseModel):
    """A directed relation ``src -> dst``; reverse relations are separate types."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(min_length=1, description="Unique edge type name, e.g. 'A-P'")
    src: str = Field(description="Source node type name")
    dst: str = Field(description="Destination (receiving) node type name")


class Schema(BaseModel):
    """Typed node and edge sets plus the labelled target type.

    Invariants: unique names, edge endpoints reference declared node types,
    the target type is declared, and ``|node types| + |edge types| > 2``.
    The last check is waived when validated with
    ``context={"allow_homogeneous": True}`` (homogeneous reference runs).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    node_types: tuple[NodeType, ...] = Field(min_length=1)
    edge_types: tuple[EdgeType, ...] = Field(default=())
    target_type: str
    num_classes: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_references(self, info: ValidationInfo) -> Schema:
        names = [n.name for n in self.node_types]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate node type names: {names}")
        edge_names = [e.name for e in self.edge_types]
        if len(set(edge_names)) != len(edge_names):
            raise ValueError(f"duplicate edge type names: {edge_names}")
        for e in self.edge_types:
            for end in (e.src, e.dst):
                if end not in names:
                    raise ValueError(f"edge type {e.name!r} references undeclared node type {end!r}")
        if self.target_type not in names:
            raise ValueError(f"target_type {self.target_type!r} is not a declared node type")
        allow_homogeneous = bool(info.context and info.context.get("allow_homogeneous"))
        if len(self.node_types) + len(self.edge_types) <= 2 and not allow_homogeneous:
            raise ValueError("a heterogeneous graph needs |node types| + |edge types| > 2")
        return self

    # -- lookups ---------------------------------------------------------------

    def node_type(self, name: str) -> NodeType:
        for n in self.node_types:
            if n.name == name:
                return n
        raise KeyError(name)

    def edge_type(self, name: str) -> EdgeType:
        for e in self.edge_types:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def node_type_names(self) -> list[str]:
        return [n.name for n in self.node_types]

    @property
    def edge_type_names(self) -> list[str]:
        return [e.name for e in self.edge_types]

    @property
    def total_nodes(self) -> int:
        return sum(n.count for n in self.node_types)

    def incoming(self, node_type: str) -> list[EdgeType]:
        """Edge types whose destination is *node_type*, in schema order."""
        return [e for e in self.edge_types if e.dst == node_type]

    def offset(self, node_type: str) -> int:
        """First global id of *node_type*'s contiguous block."""
        start = 0
        for n in self.node_types:
            if n.name == node_type:
                return start
            start += n.count
        raise KeyError(node_type)


# ---------------------------------------------------------------------------
# Manifest (manifest.json in a dataset directory)
# ---------------------------------------------------------------------------


class NodeTypeFiles(NodeType):
    feature_file: str = Field(description="Feature matrix file, relative to the dataset directory")
    format: Literal["csv", "f32le"] = Field(default="csv")


class EdgeTypeFiles(EdgeType):
    edge_file: str = Field(description="CSV 'src_local_id,dst_local_id' file")


class DatasetManifest(BaseModel):
    """Validated ``manifest.json`` of a dataset directory."""

    model_config = ConfigDict(extra="forbid")

    node_types: list[NodeTypeFiles] = Field(min_length=1)
    edge_types: list[EdgeTypeFiles] = Field(default_factory=list)
    target_type: str
    num_classes: int = Field(ge=1)
    labels_file: str = Field(default="labels.csv")
    splits_file: str = Field(default="splits.json")

    def to_schema(self) -> Schema:
        """The graph :class:`Schema` this manifest declares."""
        return Schema(
            node_types=tuple(NodeType(name=n.name, count=n.count, feature_dim=n.feature_dim) for n in self.node_types),
            edge_types=tuple(EdgeType(name=e.name, src=e.src, dst=e.dst) for e in self.edge_types),
            target_type=self.target_type,
            num_classes=self.num_classes,
        )


class Splits(BaseModel):
    """Train / validation / test local ids of the target type."""

    model_config = ConfigDict(extra="forbid")

    train: list[int] = Field(default_factory=list)
    val: list[int] = Field(default_factory=list)
    test: list[int] = Field(default_factory=list)
