"""Analytic gradients of the summed cross-entropy loss over a batch.

The loss is sum-reduced: duplicating a batch item doubles its gradient
contribution.  Gradients are taken with respect to every parameter tensor;
the cross-attention query/key projections receive exactly zero because the
single-key softmax weight is the constant 1.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import PreconditionError
from ..types import EMOTIONS, Emotion
from .config import DIRECTIONS, FusionConfig, param_shapes
from .ops import _pooled_forward, mean_pool, softmax

#: A batch item: (text embedding (T, d), audio embedding (T', d), label).
Sample = tuple[np.ndarray, np.ndarray, Emotion]


def _label_index(label) -> int:
    if isinstance(label, Emotion):
        return EMOTIONS.index(label)
    raise PreconditionError(f"batch labels must be Emotion members, got {label!r}")


def _layer_norm_backward(dout, ln_cache, gain, grads, prefix):
    normalized = ln_cache["normalized"]
    inv_std = ln_cache["inv_std"]
    grads[f"{prefix}.gain"] += (dout * normalized).sum(axis=0)
    grads[f"{prefix}.bias"] += dout.sum(axis=0)
    dn = dout * gain
    return inv_std * (
        dn
        - dn.mean(axis=-1, keepdims=True)
        - normalized * (dn * normalized).mean(axis=-1, keepdims=True)
    )


def _mha_backward(dout, cache, params, grads, prefix, heads):
    x = cache["x"]
    t, d = x.shape
    dh = d // heads
    grads[f"{prefix}.w_o"] += dout.T @ cache["concat"]
    grads[f"{prefix}.b_o"] += dout.sum(axis=0)
    dconcat = dout @ params[f"{prefix}.w_o"]

    dctx = dconcat.reshape(t, heads, dh).transpose(1, 0, 2)
    weights = cache["weights"]
    dweights = dctx @ cache["vh"].transpose(0, 2, 1)
    dvh = weights.transpose(0, 2, 1) @ dctx
    # Softmax rows: ds = w * (dw - sum(dw * w)).
    dscores = weights * (dweights - (dweights * weights).sum(axis=-1, keepdims=True))
    scale = 1.0 / math.sqrt(dh)
    dqh = dscores @ cache["kh"] * scale
    dkh = dscores.transpose(0, 2, 1) @ cache["qh"] * scale

    dq = dqh.transpose(1, 0, 2).reshape(t, d)
    dk = dkh.transpose(1, 0, 2).reshape(t, d)
    dv = dvh.transpose(1, 0, 2).reshape(t, d)
    grads[f"{prefix}.w_q"] += dq.T @ x
    grads[f"{prefix}.b_q"] += dq.sum(axis=0)
    grads[f"{prefix}.w_k"] += dk.T @ x
    grads[f"{prefix}.b_k"] += dk.sum(axis=0)
    grads[f"{prefix}.w_v"] += dv.T @ x
    grads[f"{prefix}.b_v"] += dv.sum(axis=0)
    return dq @ params[f"{prefix}.w_q"] + dk @ params[f"{prefix}.w_k"] + dv @ params[f"{prefix}.w_v"]


def _encoder_backward(dpooled, cache, params, grads, config):
    # Mean over the two tokens.
    dx2 = np.repeat(dpooled[None, :] / 2.0, 2, axis=0)
    dr2 = _layer_norm_backward(dx2, cache["ln2"], params["fuse.ln2.gain"], grads, "fuse.ln2")

    # r2 = x1 + ffn(x1)
    dffn = dr2
    grads["fuse.ffn.w2"] += dffn.T @ cache["act"]
    grads["fuse.ffn.b2"] += dffn.sum(axis=0)
    dact = dffn @ params["fuse.ffn.w2"]
    dpre = dact * (cache["pre"] > 0)
    grads["fuse.ffn.w1"] += dpre.T @ cache["x1"]
    grads["fuse.ffn.b1"] += dpre.sum(axis=0)
    dx1 = dr2 + dpre @ params["fuse.ffn.w1"]

    dr1 = _layer_norm_backward(dx1, cache["ln1"], params["fuse.ln1.gain"], grads, "fuse.ln1")
    # r1 = tokens + attn(tokens)
    return dr1 + _mha_backward(dr1, cache["attn"], params, grads, "fuse.attn", config.heads)


def _gate_backward(dh, dir_cache, params, grads, direction):
    g = dir_cache["g"]
    attended = dir_cache["attended"]
    original = dir_cache["original"]
    dattended = dh * g
    doriginal = dh * (1.0 - g)
    dg = dh * (attended - original)
    dpre = dg * g * (1.0 - g)
    grads[f"{direction}.gate.w"] += np.outer(dpre, dir_cache["gate_input"])
    grads[f"{direction}.gate.b"] += dpre
    du = params[f"{direction}.gate.w"].T @ dpre
    d = original.shape[0]
    doriginal += du[:d]
    dattended += du[d:]
    return dattended, doriginal


def _cross_attention_backward(dattended, dir_cache, params, grads, direction):
    prefix = f"{direction}.attn"
    grads[f"{prefix}.w_o"] += np.outer(dattended, dir_cache["v"])
    grads[f"{prefix}.b_o"] += dattended
    dv = params[f"{prefix}.w_o"].T @ dattended
    grads[f"{prefix}.w_v"] += np.outer(dv, dir_cache["kv"])
    grads[f"{prefix}.b_v"] += dv
    # Query/key projections: zero gradient (single-key softmax is constant).
    return params[f"{prefix}.w_v"].T @ dv


def _sample_backward(dlogits, cache, params, grads, config):
    grads["clf.w"] += np.outer(dlogits, cache["fused"])
    grads["clf.b"] += dlogits
    dfused = params["clf.w"].T @ dlogits
    dtokens = _encoder_backward(dfused, cache["encoder"], params, grads, config)
    for row, direction in zip(dtokens, DIRECTIONS):
        dattended, _ = _gate_backward(row, cache[direction], params, grads, direction)
        _cross_attention_backward(dattended, cache[direction], params, grads, direction)
        # Gradients stop at the pooled vectors: inputs are not trained.


def _batch_stats(
    batch: Sequence[Sample],
    params: dict[str, np.ndarray],
    config: FusionConfig,
    want_grads: bool = True,
):
    """One pass over the batch: summed loss, gradients, and correct count."""
    grads = (
        {name: np.zeros(shape) for name, shape in param_shapes(config).items()}
        if want_grads
        else None
    )
    loss = 0.0
    correct = 0
    for text_embedding, audio_embedding, label in batch:
        target = _label_index(label)
        z_t = mean_pool(text_embedding)
        z_a = mean_pool(audio_embedding)
        logits, cache = _pooled_forward(z_t, z_a, params, config)
        shifted = logits - logits.max()
        loss += math.log(np.exp(shifted).sum()) - shifted[target]
        if int(np.argmax(logits)) == target:
            correct += 1
        if want_grads:
            dlogits = softmax(logits)
            dlogits[target] -= 1.0
            _sample_backward(dlogits, cache, params, grads, config)
    return loss, grads, correct


def batch_loss(
    batch: Sequence[Sample], params: dict[str, np.ndarray], config: FusionConfig
) -> float:
    """Sum-reduced cross-entropy loss of the batch."""
    loss, _, _ = _batch_stats(batch, params, config, want_grads=False)
    return loss


def backward(
    batch: Sequence[Sample], params: dict[str, np.ndarray], config: FusionConfig
) -> dict[str, np.ndarray]:
    """Gradients of :func:`batch_loss` with respect to every parameter."""
    _, grads, _ = _batch_stats(batch, params, config, want_grads=True)
    return grads
