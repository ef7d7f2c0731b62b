"""Read and write the on-disk dataset directory format.

Layout::

    manifest.json          schema plus file names
    <feature files>        count x feature_dim, CSV (decimal) or f32le
    <edge files>           CSV ``src_local_id,dst_local_id``
    labels.csv             CSV ``local_id,label``
    splits.json            {"train": [...], "val": [...], "test": [...]}

CSV header lines are optional on read and always written.
"""

from __future__ import annotations

import io
import json
import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from hetgt.config.config_manager import atomic_write_bytes, atomic_write_text
from hetgt.core.errors import DataError
from hetgt.core.models.schema import DatasetManifest, EdgeTypeFiles, NodeTypeFiles, Splits
from hetgt.graph.hetero_graph import SPLIT_NAMES, HeteroGraph

_log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
EDGE_HEADER = "src_local_id,dst_local_id"
LABEL_HEADER = "local_id,label"


# ---------------------------------------------------------------------------
# Low-level readers
# ---------------------------------------------------------------------------


def _read_text(path: Path) -> str:
    if not path.is_file():
        raise DataError("file not found", file=str(path))
    return path.read_text(encoding="utf-8")


def _data_lines(path: Path) -> list[tuple[int, list[str]]]:
    """Non-blank CSV rows as ``(1-based line number, fields)``; a non-numeric first line is a header."""
    out: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if not out and lineno == 1 and fields and not _is_number(fields[0]):
            continue
        out.append((lineno, fields))
    return out


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _read_int_pairs(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """``(m x 2 int64 pairs, line numbers)`` of a two-column integer CSV."""
    rows = _data_lines(path)
    pairs = np.empty((len(rows), 2), dtype=np.int64)
    lines = np.empty(len(rows), dtype=np.int64)
    for i, (lineno, fields) in enumerate(rows):
        if len(fields) != 2:
            raise DataError(f"expected 2 columns, got {len(fields)}", file=str(path), row=lineno)
        try:
            pairs[i] = (int(fields[0]), int(fields[1]))
        except ValueError:
            raise DataError(f"non-integer value in {fields}", file=str(path), row=lineno) from None
        lines[i] = lineno
    return pairs, lines


def _read_features(directory: Path, nt: NodeTypeFiles) -> np.ndarray:
    path = directory / nt.feature_file
    if nt.format == "f32le":
        if not path.is_file():
            raise DataError("file not found", file=str(path))
        flat = np.fromfile(path, dtype="<f4")
        expected = nt.count * nt.feature_dim
        if flat.size != expected:
            raise DataError(
                f"node type {nt.name!r}: {flat.size} floats, expected {nt.count} x {nt.feature_dim}",
                file=str(path),
            )
        x = flat.reshape(nt.count, nt.feature_dim).astype(np.float64)
    else:
        rows = _data_lines(path)
        if len(rows) != nt.count:
            raise DataError(
                f"node type {nt.name!r}: {len(rows)} feature rows, manifest declares {nt.count}",
                file=str(path),
                row=rows[-1][0] if len(rows) > nt.count else None,
            )
        x = np.empty((nt.count, nt.feature_dim), dtype=np.float64)
        for i, (lineno, fields) in enumerate(rows):
            if len(fields) != nt.feature_dim:
                raise DataError(
                    f"node type {nt.name!r}: {len(fields)} columns, expected {nt.feature_dim}",
                    file=str(path),
                    row=lineno,
                )
            try:
                x[i] = np.asarray(fields, dtype=np.float64)
            except ValueError:
                raise DataError(f"node type {nt.name!r}: non-numeric value", file=str(path), row=lineno) from None
    bad = np.flatnonzero(~np.isfinite(x).all(axis=1))
    if bad.size:
        raise DataError(f"node type {nt.name!r}: non-finite feature at node {int(bad[0])}", file=str(path))
    return x


def _read_edges(directory: Path, et: EdgeTypeFiles, manifest: DatasetManifest) -> np.ndarray:
    path = directory / et.edge_file
    pairs, lines = _read_int_pairs(path)
    counts = {n.name: n.count for n in manifest.node_types}
    n_src, n_dst = counts[et.src], counts[et.dst]
    bad = np.flatnonzero((pairs[:, 0] < 0) | (pairs[:, 0] >= n_src) | (pairs[:, 1] < 0) | (pairs[:, 1] >= n_dst))
    if bad.size:
        i = int(bad[0])
        raise DataError(
            f"edge type {et.name!r}: endpoint {tuple(pairs[i].tolist())} outside {et.src}[{n_src}] x {et.dst}[{n_dst}]",
            file=str(path),
            row=int(lines[i]),
        )
    if et.src == et.dst:
        loops = np.flatnonzero(pairs[:, 0] == pairs[:, 1])
        if loops.size:
            raise DataError(
                f"edge type {et.name!r}: self-edge; self-loops are added by normalisation",
                file=str(path),
                row=int(lines[loops[0]]),
            )
    _, first = np.unique(pairs[:, 0] * n_dst + pairs[:, 1], return_index=True)
    if first.size != pairs.shape[0]:
        _log.warning("%s: dropped %d duplicate edges", path, pairs.shape[0] - first.size)
        pairs = pairs[np.sort(first)]
    return pairs


def _read_labels(directory: Path, manifest: DatasetManifest) -> np.ndarray:
    path = directory / manifest.labels_file
    pairs, lines = _read_int_pairs(path)
    n = next(n.count for n in manifest.node_types if n.name == manifest.target_type)
    labels = np.full(n, -1, dtype=np.int64)
    for (local_id, label), lineno in zip(pairs, lines, strict=True):
        if not 0 <= local_id < n:
            raise DataError(f"label for node {local_id} outside target type [0, {n})", file=str(path), row=int(lineno))
        if not 0 <= label < manifest.num_classes:
            raise DataError(f"label {label} outside [0, {manifest.num_classes})", file=str(path), row=int(lineno))
        if labels[local_id] != -1:
            raise DataError(f"node {local_id} labelled twice", file=str(path), row=int(lineno))
        labels[local_id] = label
    missing = np.flatnonzero(labels < 0)
    if missing.size:
        raise DataError(f"{missing.size} target nodes have no label (first: {int(missing[0])})", file=str(path))
    return labels


def _read_splits(directory: Path, manifest: DatasetManifest) -> dict[str, np.ndarray]:
    """Split ids, checked against the target range; ``row`` is the 1-based entry position in its list."""
    path = directory / manifest.splits_file
    n = next(nt.count for nt in manifest.node_types if nt.name == manifest.target_type)
    try:
        splits = Splits.model_validate(json.loads(_read_text(path)))
    except (json.JSONDecodeError, ValidationError) as exc:
        raise DataError(f"invalid splits: {exc}", file=str(path)) from None
    seen: dict[int, str] = {}
    for name in SPLIT_NAMES:
        for row, local_id in enumerate(getattr(splits, name), start=1):
            if not 0 <= local_id < n:
                raise DataError(f"{name!r} node {local_id} outside target type [0, {n})", file=str(path), row=row)
            if local_id in seen:
                raise DataError(f"node {local_id} in both {seen[local_id]!r} and {name!r}", file=str(path), row=row)
            seen[local_id] = name
    return {name: np.asarray(getattr(splits, name), dtype=np.int64) for name in SPLIT_NAMES}


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def load_manifest(directory: Path | str) -> DatasetManifest:
    path = Path(directory) / MANIFEST_NAME
    try:
        return DatasetManifest.model_validate(json.loads(_read_text(path)))
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc.msg}", file=str(path), row=exc.lineno) from None
    except ValidationError as exc:
        err = exc.errors()[0]
        where = ".".join(str(p) for p in err.get("loc", ())) or "<root>"
        raise DataError(f"{where}: {err['msg']}", file=str(path)) from None


def load_dataset(directory: Path | str) -> HeteroGraph:
    """Load and validate a dataset directory.

    Raises:
        DataError: Naming the offending file (and row where one applies)
            for a missing file, a count or dimension mismatch, an
            out-of-range label or endpoint, or overlapping splits.
    """
    root = Path(directory)
    manifest = load_manifest(root)
    try:
        schema = manifest.to_schema()
    except ValidationError as exc:
        raise DataError(f"invalid schema: {exc.errors()[0]['msg']}", file=str(root / MANIFEST_NAME)) from None

    features = {nt.name: _read_features(root, nt) for nt in manifest.node_types}
    edges = {et.name: _read_edges(root, et, manifest) for et in manifest.edge_types}
    labels = _read_labels(root, manifest)
    splits = _read_splits(root, manifest)

    graph = HeteroGraph(schema=schema, features=features, edges=edges, labels=labels, splits=splits)
    _log.info("Loaded dataset %s: %s", root, graph.summary())
    return graph


def _csv_text(header: str | None, array: np.ndarray, fmt: str) -> str:
    buf = io.StringIO()
    np.savetxt(buf, array, fmt=fmt, delimiter=",", header=header or "", comments="")
    return buf.getvalue()


def write_dataset(graph: HeteroGraph, directory: Path | str, feature_format: str = "csv") -> Path:
    """Write *graph* in the dataset directory format; byte-deterministic.

    CSV features use ``%.17g`` so float64 values round-trip exactly;
    ``f32le`` stores 32-bit floats.
    """
    root = Path(directory)
    (root / "features").mkdir(parents=True, exist_ok=True)
    (root / "edges").mkdir(parents=True, exist_ok=True)

    node_files: list[NodeTypeFiles] = []
    for nt in graph.schema.node_types:
        x = graph.features[nt.name]
        if feature_format == "f32le":
            rel = f"features/{nt.name}.f32"
            atomic_write_bytes(root / rel, x.astype("<f4").tobytes())
        else:
            rel = f"features/{nt.name}.csv"
            atomic_write_text(root / rel, _csv_text(None, x, "%.17g"))
        node_files.append(NodeTypeFiles(**nt.model_dump(), feature_file=rel, format=feature_format))

    edge_files: list[EdgeTypeFiles] = []
    for et in graph.schema.edge_types:
        rel = f"edges/{et.name}.csv"
        atomic_write_text(root / rel, _csv_text(EDGE_HEADER, graph.edges[et.name], "%d"))
        edge_files.append(EdgeTypeFiles(**et.model_dump(), edge_file=rel))

    ids = np.arange(graph.labels.shape[0], dtype=np.int64)
    atomic_write_text(root / "labels.csv", _csv_text(LABEL_HEADER, np.column_stack([ids, graph.labels]), "%d"))
    splits = {name: graph.splits[name].tolist() for name in SPLIT_NAMES}
    atomic_write_text(root / "splits.json", json.dumps(splits) + "\n")

    manifest = DatasetManifest(
        node_types=node_files,
        edge_types=edge_files,
        target_type=graph.schema.target_type,
        num_classes=graph.schema.num_classes,
    )
    atomic_write_text(root / MANIFEST_NAME, json.dumps(manifest.model_dump(mode="json"), indent=2) + "\n")
    _log.info("Wrote dataset to %s", root)
    return root
