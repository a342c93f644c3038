"""Forward operations of the fusion classifier, float64 throughout.

The model consumes one text and one audio embedding matrix per utterance.
Each matrix is mean-pooled to a single vector, so both cross-attention
blocks run with sequence length one on both sides; softmax over a single
key is identically 1, which makes each cross-attention output a pure
value-path transform of the other modality, independent of the query
vector's value.  A sigmoid forget gate then mixes each pooled vector with
what it attended, the two gated vectors pass through one post-norm
transformer encoder layer as a two-token sequence (no positional encoding,
so the tokens are exchangeable), and the mean of the two output tokens is
classified linearly over the four emotions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ..errors import DegenerateInputError, PreconditionError
from ..types import EMOTIONS, Emotion
from .config import DIRECTIONS, FusionConfig

#: Stabilizer inside the layer-norm square root.
LN_EPS = 1e-12


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Numerically stable softmax along an axis."""
    shifted = x - np.max(x, axis=axis, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=axis, keepdims=True)


def _check_direction(direction: str) -> None:
    if direction not in DIRECTIONS:
        raise PreconditionError(
            f"direction must be one of {DIRECTIONS}, got {direction!r}"
        )


def _check_vector(v: np.ndarray, d: int, what: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (d,):
        raise PreconditionError(f"{what} must have shape ({d},), got {v.shape}")
    return v


def mean_pool(matrix: np.ndarray) -> np.ndarray:
    """Pool a (T, d) embedding matrix to a single d-vector (column means).

    Raises:
        DegenerateInputError: the matrix has no frames.
        PreconditionError: the input is not 2-D.
    """
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2:
        raise PreconditionError(f"embedding must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise DegenerateInputError("cannot pool an embedding with zero frames")
    return arr.mean(axis=0)


def cross_attention(
    query: np.ndarray,
    keyvalue: np.ndarray,
    params: dict[str, np.ndarray],
    config: FusionConfig,
    direction: str,
) -> np.ndarray:
    """Single-query, single-key multi-head cross attention.

    With one key the per-head softmax weight is exactly 1 regardless of the
    score, so the output reduces to the value path: W_o (W_v kv + b_v) +
    b_o.  The query and key projections exist for architectural fidelity
    and receive zero gradient.
    """
    _check_direction(direction)
    _check_vector(query, config.d, "query")
    kv = _check_vector(keyvalue, config.d, "keyvalue")
    prefix = f"{direction}.attn"
    v = params[f"{prefix}.w_v"] @ kv + params[f"{prefix}.b_v"]
    return params[f"{prefix}.w_o"] @ v + params[f"{prefix}.b_o"]


def forget_gate(
    original: np.ndarray,
    attended: np.ndarray,
    params: dict[str, np.ndarray],
    direction: str,
) -> np.ndarray:
    """Sigmoid gate mixing the attended vector into the original one.

    g = sigmoid(W_g [original; attended] + b_g), output g * attended +
    (1 - g) * original, a componentwise convex combination.
    """
    _check_direction(direction)
    h, _, _ = _forget_gate_parts(
        np.asarray(original, dtype=np.float64),
        np.asarray(attended, dtype=np.float64),
        params,
        direction,
    )
    return h


def _forget_gate_parts(original, attended, params, direction):
    gate_input = np.concatenate([original, attended])
    g = expit(params[f"{direction}.gate.w"] @ gate_input + params[f"{direction}.gate.b"])
    return g * attended + (1.0 - g) * original, g, gate_input


def layer_norm(x: np.ndarray, gain: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Layer normalization over the last axis, then gain and bias."""
    out, _ = _layer_norm_parts(np.asarray(x, dtype=np.float64), gain, bias)
    return out


def _layer_norm_parts(x, gain, bias):
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + LN_EPS)
    normalized = (x - mu) * inv_std
    return gain * normalized + bias, {"normalized": normalized, "inv_std": inv_std}


def _mha_parts(x, params, prefix, heads):
    """Multi-head self attention over a (T, d) token matrix, with cache."""
    t, d = x.shape
    dh = d // heads
    q = x @ params[f"{prefix}.w_q"].T + params[f"{prefix}.b_q"]
    k = x @ params[f"{prefix}.w_k"].T + params[f"{prefix}.b_k"]
    v = x @ params[f"{prefix}.w_v"].T + params[f"{prefix}.b_v"]
    qh = q.reshape(t, heads, dh).transpose(1, 0, 2)
    kh = k.reshape(t, heads, dh).transpose(1, 0, 2)
    vh = v.reshape(t, heads, dh).transpose(1, 0, 2)
    scores = qh @ kh.transpose(0, 2, 1) / np.sqrt(dh)
    weights = softmax(scores, axis=-1)
    concat = (weights @ vh).transpose(1, 0, 2).reshape(t, d)
    out = concat @ params[f"{prefix}.w_o"].T + params[f"{prefix}.b_o"]
    cache = {"x": x, "weights": weights, "vh": vh, "qh": qh, "kh": kh, "concat": concat}
    return out, cache


def _encoder_parts(tokens, params, config):
    """One post-norm transformer encoder layer plus token mean-pooling."""
    attn_out, attn_cache = _mha_parts(tokens, params, "fuse.attn", config.heads)
    r1 = tokens + attn_out
    x1, ln1_cache = _layer_norm_parts(r1, params["fuse.ln1.gain"], params["fuse.ln1.bias"])
    pre = x1 @ params["fuse.ffn.w1"].T + params["fuse.ffn.b1"]
    act = np.maximum(pre, 0.0)
    ffn = act @ params["fuse.ffn.w2"].T + params["fuse.ffn.b2"]
    r2 = x1 + ffn
    x2, ln2_cache = _layer_norm_parts(r2, params["fuse.ln2.gain"], params["fuse.ln2.bias"])
    pooled = x2.mean(axis=0)
    cache = {
        "attn": attn_cache,
        "ln1": ln1_cache,
        "ln2": ln2_cache,
        "x1": x1,
        "pre": pre,
        "act": act,
        "tokens": tokens,
    }
    return pooled, cache


def fusion_layer(
    h_ta: np.ndarray,
    h_at: np.ndarray,
    params: dict[str, np.ndarray],
    config: FusionConfig,
) -> np.ndarray:
    """Fuse the two gated vectors through the encoder layer.

    The two vectors form a two-token sequence with no positional encoding;
    swapping them leaves the pooled output unchanged.
    """
    tokens = np.stack(
        [
            _check_vector(h_ta, config.d, "gated text vector"),
            _check_vector(h_at, config.d, "gated audio vector"),
        ]
    )
    pooled, _ = _encoder_parts(tokens, params, config)
    return pooled


def classify(
    fused: np.ndarray, params: dict[str, np.ndarray]
) -> tuple[np.ndarray, Emotion]:
    """Linear head over the fused vector: probabilities and the argmax label.

    Ties on the maximum probability resolve to the smaller class index.
    """
    logits = params["clf.w"] @ np.asarray(fused, dtype=np.float64) + params["clf.b"]
    probabilities = softmax(logits)
    return probabilities, EMOTIONS[int(np.argmax(probabilities))]


@dataclass(frozen=True)
class FusionOutput:
    """Forward-pass result with intermediates exposed for inspection."""

    probabilities: np.ndarray
    predicted: Emotion
    fused: np.ndarray
    intermediates: dict[str, np.ndarray]


def _pooled_forward(z_t, z_a, params, config):
    """Forward pass from pooled vectors to logits, returning a full cache."""
    cache: dict = {"z_t": z_t, "z_a": z_a}
    inputs = {"t2a": (z_t, z_a), "a2t": (z_a, z_t)}
    gated = {}
    for direction in DIRECTIONS:
        original, kv = inputs[direction]
        prefix = f"{direction}.attn"
        v = params[f"{prefix}.w_v"] @ kv + params[f"{prefix}.b_v"]
        attended = params[f"{prefix}.w_o"] @ v + params[f"{prefix}.b_o"]
        h, g, gate_input = _forget_gate_parts(original, attended, params, direction)
        gated[direction] = h
        cache[direction] = {
            "kv": kv,
            "v": v,
            "attended": attended,
            "original": original,
            "g": g,
            "gate_input": gate_input,
            "h": h,
        }
    tokens = np.stack([gated["t2a"], gated["a2t"]])
    fused, encoder_cache = _encoder_parts(tokens, params, config)
    logits = params["clf.w"] @ fused + params["clf.b"]
    cache["encoder"] = encoder_cache
    cache["fused"] = fused
    cache["logits"] = logits
    return logits, cache


def forward(
    text_embedding: np.ndarray,
    audio_embedding: np.ndarray,
    params: dict[str, np.ndarray],
    config: FusionConfig,
) -> FusionOutput:
    """Run the full model on one utterance's embedding matrices.

    Raises:
        PreconditionError: an embedding is not 2-D or has the wrong width.
        DegenerateInputError: an embedding has zero frames.
    """
    z_t = _check_vector(mean_pool(text_embedding), config.d, "pooled text embedding")
    z_a = _check_vector(mean_pool(audio_embedding), config.d, "pooled audio embedding")
    logits, cache = _pooled_forward(z_t, z_a, params, config)
    probabilities = softmax(logits)
    predicted = EMOTIONS[int(np.argmax(probabilities))]
    return FusionOutput(
        probabilities=probabilities,
        predicted=predicted,
        fused=cache["fused"],
        intermediates={
            "pooled_text": z_t,
            "pooled_audio": z_a,
            "attended_t2a": cache["t2a"]["attended"],
            "attended_a2t": cache["a2t"]["attended"],
            "gate_t2a": cache["t2a"]["g"],
            "gate_a2t": cache["a2t"]["g"],
            "gated_t2a": cache["t2a"]["h"],
            "gated_a2t": cache["a2t"]["h"],
        },
    )
