"""Layers, parameters and full-model forward passes."""

from hetgt.nn.layers import (
    gat_edge_forward,
    gcn_edge_forward,
    gtan_attention,
    gtan_edge_forward,
    gtan_edge_message,
    gtcn_edge_forward,
    mean_aggregate,
    output_head,
    project_features,
    semantic_aggregate,
    semantic_weights,
    weighted_sum_aggregate,
)
from hetgt.nn.models import ForwardOutput, forward, receptive_field_probe, run_forward
from hetgt.nn.params import ModelParams, glorot_bound, init_params, load_checkpoint, param_shapes, save_checkpoint

__all__ = [
    "ForwardOutput",
    "ModelParams",
    "forward",
    "gat_edge_forward",
    "gcn_edge_forward",
    "glorot_bound",
    "gtan_attention",
    "gtan_edge_forward",
    "gtan_edge_message",
    "gtcn_edge_forward",
    "init_params",
    "load_checkpoint",
    "mean_aggregate",
    "output_head",
    "param_shapes",
    "project_features",
    "receptive_field_probe",
    "run_forward",
    "save_checkpoint",
    "semantic_aggregate",
    "semantic_weights",
    "weighted_sum_aggregate",
]
