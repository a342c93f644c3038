"""Gated cross-attention fusion classifier over pooled embedding pairs."""

from .checkpoint import parse_checkpoint, write_checkpoint
from .config import DIRECTIONS, FusionConfig, init_params, param_shapes
from .grad import Sample, backward, batch_loss
from .ops import (
    LN_EPS,
    FusionOutput,
    classify,
    cross_attention,
    forget_gate,
    forward,
    fusion_layer,
    layer_norm,
    mean_pool,
    softmax,
)
from .train import TrainingResult, make_toy_dataset, train_toy

__all__ = [
    "DIRECTIONS",
    "LN_EPS",
    "FusionConfig",
    "FusionOutput",
    "Sample",
    "TrainingResult",
    "backward",
    "batch_loss",
    "classify",
    "cross_attention",
    "forget_gate",
    "forward",
    "fusion_layer",
    "init_params",
    "layer_norm",
    "make_toy_dataset",
    "mean_pool",
    "param_shapes",
    "parse_checkpoint",
    "softmax",
    "train_toy",
    "write_checkpoint",
]
