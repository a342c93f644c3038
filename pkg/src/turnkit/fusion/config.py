"""Configuration and parameter initialization for the fusion classifier.

Parameters live in a flat dict of named float64 tensors.  Naming scheme:

* ``t2a.attn.*`` / ``a2t.attn.*``: cross-attention projections for the
  text-queries-audio and audio-queries-text directions (w_q, w_k, w_v,
  w_o, each d x d, with bias vectors b_q .. b_o),
* ``t2a.gate.w`` / ``a2t.gate.w``: forget-gate weights (d x 2d) and
  ``*.gate.b`` biases,
* ``fuse.attn.*``: self-attention projections of the two-token fusion
  layer, ``fuse.ln1/ln2.gain|bias``: its layer norms, ``fuse.ffn.w1|b1|
  w2|b2``: its feed-forward sublayer (d -> ffn_multiplier*d -> d),
* ``clf.w`` (classes x d) and ``clf.b``: the linear classifier head.

Weight matrices initialize uniformly in [-1/sqrt(d), 1/sqrt(d)] from the
seeded generator, biases start at zero, and layer-norm gains at one.  The
draw order equals the iteration order of :func:`param_shapes`, so a given
(config, seed) always produces identical parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..types import EMOTIONS

#: The two cross-attention directions: text queries audio, audio queries text.
DIRECTIONS = ("t2a", "a2t")


@dataclass(frozen=True, slots=True)
class FusionConfig:
    """Architecture hyperparameters.

    Attributes:
        d: model width; production embeddings are 768-dimensional, tests
            run at 8.
        heads: attention head count; must divide d.
        classes: output label count, fixed to the four emotions.
        ffn_multiplier: hidden width of the fusion feed-forward sublayer
            as a multiple of d.
        seed: generator seed for parameter initialization.
    """

    d: int = 768
    heads: int = 1
    classes: int = 4
    ffn_multiplier: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValidationError(f"model width d must be at least 2, got {self.d}")
        if self.heads < 1:
            raise ValidationError(f"head count must be at least 1, got {self.heads}")
        if self.d % self.heads != 0:
            raise ValidationError(
                f"head count {self.heads} must divide model width {self.d}"
            )
        if self.classes != len(EMOTIONS):
            raise ValidationError(
                f"classifier is defined over the {len(EMOTIONS)} emotions, got {self.classes}"
            )
        if self.ffn_multiplier < 1:
            raise ValidationError(
                f"ffn_multiplier must be at least 1, got {self.ffn_multiplier}"
            )


def param_shapes(config: FusionConfig) -> dict[str, tuple[int, ...]]:
    """Every parameter tensor's name and shape, in initialization order."""
    d = config.d
    hidden = config.ffn_multiplier * d
    shapes: dict[str, tuple[int, ...]] = {}
    for direction in DIRECTIONS:
        for name in ("w_q", "w_k", "w_v", "w_o"):
            shapes[f"{direction}.attn.{name}"] = (d, d)
        for name in ("b_q", "b_k", "b_v", "b_o"):
            shapes[f"{direction}.attn.{name}"] = (d,)
        shapes[f"{direction}.gate.w"] = (d, 2 * d)
        shapes[f"{direction}.gate.b"] = (d,)
    for name in ("w_q", "w_k", "w_v", "w_o"):
        shapes[f"fuse.attn.{name}"] = (d, d)
    for name in ("b_q", "b_k", "b_v", "b_o"):
        shapes[f"fuse.attn.{name}"] = (d,)
    shapes["fuse.ln1.gain"] = (d,)
    shapes["fuse.ln1.bias"] = (d,)
    shapes["fuse.ffn.w1"] = (hidden, d)
    shapes["fuse.ffn.b1"] = (hidden,)
    shapes["fuse.ffn.w2"] = (d, hidden)
    shapes["fuse.ffn.b2"] = (d,)
    shapes["fuse.ln2.gain"] = (d,)
    shapes["fuse.ln2.bias"] = (d,)
    shapes["clf.w"] = (config.classes, d)
    shapes["clf.b"] = (config.classes,)
    return shapes


def init_params(config: FusionConfig) -> dict[str, np.ndarray]:
    """Draw a fresh parameter set for the given configuration."""
    rng = np.random.default_rng(config.seed)
    bound = 1.0 / math.sqrt(config.d)
    params: dict[str, np.ndarray] = {}
    for name, shape in param_shapes(config).items():
        leaf = name.rsplit(".", 1)[1]
        if leaf.startswith("w"):
            params[name] = rng.uniform(-bound, bound, size=shape)
        elif leaf == "gain":
            params[name] = np.ones(shape)
        else:
            params[name] = np.zeros(shape)
    return params
