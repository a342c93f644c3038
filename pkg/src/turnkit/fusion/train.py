"""Toy training loop demonstrating that the fusion classifier learns.

The synthetic task draws one centroid per emotion and modality, spaces the
centroids about ``separation`` apart (in units of the unit-variance frame
noise), and emits 1 to 5 noisy frames per sample.  Training is full-batch
gradient descent with a fixed learning rate; the parameter update uses the
batch-mean gradient so the rate is independent of the sample count, while
:func:`turnkit.fusion.grad.backward` itself keeps its sum-reduction
contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import TrainingError, ValidationError
from ..types import EMOTIONS, Emotion
from .config import FusionConfig, init_params
from .grad import Sample, _batch_stats


def make_toy_dataset(
    n_samples: int,
    config: FusionConfig,
    separation: float = 4.0,
    min_frames: int = 1,
    max_frames: int = 5,
    seed: int | None = None,
) -> list[Sample]:
    """Generate a balanced synthetic dataset of embedding pairs.

    Args:
        n_samples: number of samples; labels cycle through the four
            emotions so classes stay balanced.
        config: supplies the embedding width (and the default seed).
        separation: expected distance between class centroids, in units
            of the per-frame noise standard deviation (which is 1).
        min_frames: fewest frames per embedding matrix.
        max_frames: most frames per embedding matrix.
        seed: generator seed; defaults to ``config.seed``.

    Returns:
        A list of (text embedding, audio embedding, label) samples.
    """
    if n_samples < 1:
        raise ValidationError(f"n_samples must be at least 1, got {n_samples}")
    if not 1 <= min_frames <= max_frames:
        raise ValidationError(
            f"frame bounds must satisfy 1 <= min <= max, got [{min_frames}, {max_frames}]"
        )
    rng = np.random.default_rng(config.seed if seed is None else seed)
    # Entries N(0, separation^2 / (2 d)) give E||c_i - c_j||^2 = separation^2.
    scale = separation / math.sqrt(2 * config.d)
    centroids = {
        "text": rng.normal(0.0, scale, size=(len(EMOTIONS), config.d)),
        "audio": rng.normal(0.0, scale, size=(len(EMOTIONS), config.d)),
    }
    samples: list[Sample] = []
    for i in range(n_samples):
        cls = i % len(EMOTIONS)
        pair = []
        for modality in ("text", "audio"):
            frames = int(rng.integers(min_frames, max_frames + 1))
            pair.append(centroids[modality][cls] + rng.normal(size=(frames, config.d)))
        samples.append((pair[0], pair[1], EMOTIONS[cls]))
    return samples


@dataclass
class TrainingResult:
    """Trace of one training run.

    ``losses[i]`` and ``accuracies[i]`` describe the parameters after i
    gradient updates, so index 0 is the untrained model and the last entry
    describes the returned parameters.  ``steps`` counts updates performed.
    """

    params: dict[str, np.ndarray]
    losses: list[float] = field(default_factory=list)
    accuracies: list[float] = field(default_factory=list)
    steps: int = 0


def train_toy(
    dataset: list[Sample],
    config: FusionConfig,
    lr: float = 0.05,
    max_steps: int = 500,
    target_accuracy: float | None = None,
) -> TrainingResult:
    """Train freshly initialized parameters on the dataset.

    Runs full-batch gradient descent for up to ``max_steps`` updates,
    stopping early once ``target_accuracy`` (if given) is reached.  The
    same (dataset, config, lr) always produces the identical trace.

    Raises:
        TrainingError: the loss became NaN or infinite; carries the step.
        ValidationError: empty dataset or a non-positive step budget.
    """
    if not dataset:
        raise ValidationError("cannot train on an empty dataset")
    if max_steps < 0:
        raise ValidationError(f"max_steps must be non-negative, got {max_steps}")
    params = init_params(config)
    result = TrainingResult(params=params)
    n = len(dataset)
    while True:
        loss, grads, correct = _batch_stats(dataset, params, config, want_grads=True)
        if not math.isfinite(loss):
            raise TrainingError(
                f"loss became non-finite ({loss}) at step {result.steps}",
                step=result.steps,
            )
        result.losses.append(loss)
        result.accuracies.append(correct / n)
        if target_accuracy is not None and result.accuracies[-1] >= target_accuracy:
            break
        if result.steps >= max_steps:
            break
        for name, grad in grads.items():
            params[name] -= lr * grad / n
        result.steps += 1
    result.params = params
    return result
