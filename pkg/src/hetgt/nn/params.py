"""Named model parameters, Glorot initialisation and binary checkpoints.

Parameter names are stable and form the checkpoint keys::

    projection/{node_type}/weight        d_a x f
    projection/{node_type}/bias          1 x f
    layer{t}/attention/{edge_type}       2f x 1     (HetGTAN, HetGTAN_ns, HetGAT)
    layer{t}/transform/weight            f x f      (HetGCN, HetGAT)
    layer{t}/semantic/{node_type}/weight f x f'     (aggregator = semantic)
    layer{t}/semantic/{node_type}/bias   1 x f'
    layer{t}/semantic/{node_type}/query  f' x 1
    layer{t}/edge_weights/{node_type}    K_a x 1    (aggregator = weighted_sum)
    output/{target_type}/weight          f x C
    output/{target_type}/bias            1 x C

``t`` counts propagation steps from 1 to L.
"""

from __future__ import annotations

import json
import logging
import struct
from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from hetgt.config.config_manager import atomic_write_bytes
from hetgt.core.errors import ContractError, DataError
from hetgt.core.models.config import ATTENTION_KINDS, ModelSpec
from hetgt.core.models.schema import Schema
from hetgt.tensor.tensor import Tensor

_log = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"HGTCKPT1"


def glorot_bound(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


@dataclass
class ModelParams:
    """Ordered ``name -> Tensor`` mapping of every learnable of one model."""

    tensors: dict[str, Tensor] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Tensor:
        try:
            return self.tensors[name]
        except KeyError:
            raise ContractError(f"model has no parameter {name!r}") from None

    def __contains__(self, name: object) -> bool:
        return name in self.tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def __len__(self) -> int:
        return len(self.tensors)

    def names(self) -> list[str]:
        return list(self.tensors)

    def values(self) -> list[Tensor]:
        return list(self.tensors.values())

    def items(self) -> list[tuple[str, Tensor]]:
        return list(self.tensors.items())

    def zero_grad(self) -> None:
        for t in self.tensors.values():
            t.zero_grad()

    def snapshot(self) -> dict[str, np.ndarray]:
        """Copies of every parameter's values."""
        return {name: t.data.copy() for name, t in self.tensors.items()}

    def restore(self, snapshot: dict[str, np.ndarray]) -> None:
        """Overwrite values in place from :meth:`snapshot`."""
        for name, t in self.tensors.items():
            t.data[...] = snapshot[name]

    def all_finite(self) -> bool:
        return all(np.isfinite(t.data).all() for t in self.tensors.values())

    def num_values(self) -> int:
        return int(sum(t.data.size for t in self.tensors.values()))

    # -- typed views -----------------------------------------------------------

    def projection(self, node_type: str) -> tuple[Tensor, Tensor]:
        return self[f"projection/{node_type}/weight"], self[f"projection/{node_type}/bias"]

    def attention(self, layer: int, edge_type: str) -> Tensor:
        return self[f"layer{layer}/attention/{edge_type}"]

    def transform(self, layer: int) -> Tensor:
        return self[f"layer{layer}/transform/weight"]

    def semantic(self, layer: int, node_type: str) -> tuple[Tensor, Tensor, Tensor]:
        prefix = f"layer{layer}/semantic/{node_type}"
        return self[f"{prefix}/weight"], self[f"{prefix}/bias"], self[f"{prefix}/query"]

    def edge_weights(self, layer: int, node_type: str) -> Tensor:
        return self[f"layer{layer}/edge_weights/{node_type}"]

    def output(self, target_type: str) -> tuple[Tensor, Tensor]:
        return self[f"output/{target_type}/weight"], self[f"output/{target_type}/bias"]


# ---------------------------------------------------------------------------
# Initialisation
# ---------------------------------------------------------------------------


def param_shapes(spec: ModelSpec, schema: Schema) -> dict[str, tuple[tuple[int, int], str]]:
    """``name -> (shape, init)`` in creation order; init is glorot, zeros or uniform."""
    f, fs = spec.hidden, spec.semantic_hidden
    shapes: dict[str, tuple[tuple[int, int], str]] = {}
    for nt in schema.node_types:
        shapes[f"projection/{nt.name}/weight"] = ((nt.feature_dim, f), "glorot")
        shapes[f"projection/{nt.name}/bias"] = ((1, f), "zeros")
    for t in range(1, spec.depth + 1):
        if spec.kind in ATTENTION_KINDS:
            for et in schema.edge_types:
                shapes[f"layer{t}/attention/{et.name}"] = ((2 * f, 1), "glorot")
        if spec.kind in ("HetGCN", "HetGAT"):
            shapes[f"layer{t}/transform/weight"] = ((f, f), "glorot")
        for nt in schema.node_types:
            k_a = len(schema.incoming(nt.name))
            if k_a == 0:
                continue
            if spec.aggregator == "semantic":
                prefix = f"layer{t}/semantic/{nt.name}"
                shapes[f"{prefix}/weight"] = ((f, fs), "glorot")
                shapes[f"{prefix}/bias"] = ((1, fs), "zeros")
                shapes[f"{prefix}/query"] = ((fs, 1), "glorot")
            elif spec.aggregator == "weighted_sum":
                shapes[f"layer{t}/edge_weights/{nt.name}"] = ((k_a, 1), "uniform")
    target = schema.target_type
    shapes[f"output/{target}/weight"] = ((f, schema.num_classes), "glorot")
    shapes[f"output/{target}/bias"] = ((1, schema.num_classes), "zeros")
    return shapes


def init_params(spec: ModelSpec, schema: Schema, seed: int) -> ModelParams:
    """Glorot-uniform weights and attention vectors, zero biases, ``1/K_a`` edge weights.

    Deterministic per *seed*.
    """
    rng = np.random.default_rng(seed)
    tensors: dict[str, Tensor] = {}
    for name, ((rows, cols), init) in param_shapes(spec, schema).items():
        if init == "glorot":
            bound = glorot_bound(rows, cols)
            data = rng.uniform(-bound, bound, size=(rows, cols))
        elif init == "uniform":
            data = np.full((rows, cols), 1.0 / rows)
        else:
            data = np.zeros((rows, cols))
        tensors[name] = Tensor(data, requires_grad=True, name=name)
    params = ModelParams(tensors)
    _log.debug("init_params(%s, seed=%d): %d tensors, %d values", spec.label, seed, len(params), params.num_values())
    return params


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------


def save_checkpoint(path: Path | str, params: ModelParams, metadata: dict[str, Any] | None = None) -> Path:
    """Write ``magic | u64 header length | JSON header | <f4 payload``.

    The header lists ``name``, ``shape`` and byte ``offset`` of every
    parameter plus free-form *metadata*.
    """
    out = Path(path)
    entries: list[dict[str, Any]] = []
    chunks: list[bytes] = []
    offset = 0
    for name, t in params.items():
        raw = np.ascontiguousarray(t.data, dtype="<f4").tobytes()
        entries.append({"name": name, "shape": list(t.shape), "offset": offset})
        chunks.append(raw)
        offset += len(raw)
    header = json.dumps({"params": entries, "metadata": metadata or {}}, sort_keys=True).encode("utf-8")
    atomic_write_bytes(out, b"".join([CHECKPOINT_MAGIC, struct.pack("<Q", len(header)), header, *chunks]))
    _log.info("Saved checkpoint %s (%d tensors)", out, len(entries))
    return out


def load_checkpoint(path: Path | str) -> tuple[ModelParams, dict[str, Any]]:
    """Read a checkpoint written by :func:`save_checkpoint`.

    Raises:
        DataError: If the file is truncated or not a checkpoint.
    """
    src = Path(path)
    if not src.is_file():
        raise DataError("checkpoint not found", file=str(src))
    blob = src.read_bytes()
    head = len(CHECKPOINT_MAGIC) + 8
    if len(blob) < head or blob[: len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise DataError("not a hetgt checkpoint", file=str(src))
    (header_len,) = struct.unpack("<Q", blob[len(CHECKPOINT_MAGIC) : head])
    try:
        header = json.loads(blob[head : head + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise DataError("corrupt checkpoint header", file=str(src)) from None
    payload = memoryview(blob)[head + header_len :]
    tensors: dict[str, Tensor] = {}
    for entry in header["params"]:
        rows, cols = entry["shape"]
        start = entry["offset"]
        stop = start + rows * cols * 4
        if stop > len(payload):
            raise DataError(f"payload truncated at {entry['name']!r}", file=str(src))
        data = np.frombuffer(payload[start:stop], dtype="<f4").reshape(rows, cols)
        tensors[entry["name"]] = Tensor(data, requires_grad=True, name=entry["name"])
    return ModelParams(tensors), header.get("metadata", {})
