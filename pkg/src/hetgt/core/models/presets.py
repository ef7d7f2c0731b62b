"""Published per-dataset hyperparameters, applied under explicit config values."""

from __future__ import annotations

import copy
from typing import Any

_COMMON_MODEL: dict[str, Any] = {"hidden": 64, "semantic_hidden": 128}
_COMMON_TRAIN: dict[str, Any] = {"lr": 0.005, "max_epochs": 500, "patience": 100}

_GAT_DROPOUT = {"acm": (0.8, 0.2), "imdb": (0.8, 0.2), "dblp": (0.0, 0.0)}
_GCN_DROPOUT = {"acm": (0.5, 0.5), "imdb": (0.5, 0.5), "dblp": (0.0, 0.0)}
_GTCN_DROPOUT = {"acm": (0.8, 0.6), "imdb": (0.8, 0.6), "dblp": (0.8, 0.6)}

# kind -> (depth, weight decay, dropout table)
_KIND_SETTINGS: dict[str, tuple[int, float, dict[str, tuple[float, float]]]] = {
    "HetGCN": (2, 1e-5, _GCN_DROPOUT),
    "HetGAT": (2, 5e-5, _GAT_DROPOUT),
    "HetGTCN": (5, 1e-5, _GTCN_DROPOUT),
    "HetGTAN": (5, 5e-5, _GAT_DROPOUT),
    "HetGTAN_ns": (5, 5e-5, _GAT_DROPOUT),
}


def preset_values(preset: str, kind: str) -> dict[str, Any]:
    """Raw ``{"model": ..., "train": ...}`` fragment for *preset* and *kind*."""
    depth, weight_decay, table = _KIND_SETTINGS[kind]
    projection, layer = table[preset]
    return {
        "model": {**_COMMON_MODEL, "depth": depth, "dropout": {"projection": projection, "layer": layer}},
        "train": {**_COMMON_TRAIN, "weight_decay": weight_decay},
    }


def _merge_under(base: dict[str, Any], explicit: dict[str, Any]) -> dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in explicit.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge_under(out[key], value)
        else:
            out[key] = value
    return out


def apply_preset(raw: dict[str, Any]) -> dict[str, Any]:
    """Fill unset fields of a raw config dict from its ``preset``, if any."""
    preset = raw.get("preset")
    if preset is None:
        return raw
    kind = (raw.get("model") or {}).get("kind", "HetGTCN")
    if preset not in ("acm", "imdb", "dblp") or kind not in _KIND_SETTINGS:
        return raw  # validation reports the bad value
    return _merge_under(preset_values(preset, kind), raw)
