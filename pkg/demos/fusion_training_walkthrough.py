"""Walk through training the gated cross-attention fusion classifier.

The classifier fuses a text embedding and an audio embedding of the same
utterance: each modality cross-attends to the other, a sigmoid forget gate
blends the attended vector with the original, and a small transformer
encoder over the two gated tokens produces one fused vector for the
four-emotion softmax head.

Real embeddings come from pretrained encoders; here a synthetic dataset
with one centroid per (emotion, modality) stands in, which is enough to
watch the whole stack learn from gradient descent alone.

Run with:  python3 demos/fusion_training_walkthrough.py
"""

import numpy as np

from turnkit import fusion

config = fusion.FusionConfig(d=8, heads=1, seed=0)
# 204 draws from one generator: 200 to train on, 4 unseen ones to probe.
dataset = fusion.make_toy_dataset(204, config, separation=4.0)
dataset, holdout = dataset[:200], dataset[200:]
text0, audio0, label0 = dataset[0]
print(f"Dataset: {len(dataset)} samples, width d={config.d}, 4 balanced classes.")
print(f"  sample 0: text {text0.shape}, audio {audio0.shape}, label {label0.value}")

print()
print("Training: full-batch gradient descent, lr 0.05, stop at 95%.")
result = fusion.train_toy(dataset, config, lr=0.05, max_steps=500, target_accuracy=0.95)
for step in range(0, result.steps + 1, max(1, result.steps // 8)):
    print(
        f"  step {step:3d}  loss {result.losses[step]:7.4f}  "
        f"accuracy {result.accuracies[step]:6.2%}"
    )
print(f"  reached {result.accuracies[-1]:.2%} after {result.steps} updates")

print()
print("Inference on held-out samples the model never trained on:")
for text, audio, truth in holdout:
    out = fusion.forward(text, audio, result.params, config)
    print(f"  truth {truth.value:<7} -> predicted {out.predicted.value:<7} "
          f"(p = {out.probabilities.max():.2f})")

print()
print("The forget gate decides how much attended context each modality")
print("keeps.  Values near 1 trust the other modality; near 0 keep the")
print("original embedding:")
text, audio, _ = holdout[0]
out = fusion.forward(text, audio, result.params, config)
gate = out.intermediates["gate_t2a"]
print(f"  text-side gate: min {gate.min():.2f}, mean {gate.mean():.2f}, max {gate.max():.2f}")

print()
print("Checkpoint round trip preserves every tensor bit-for-bit:")
document = fusion.write_checkpoint(result.params, config)
restored, _ = fusion.parse_checkpoint(document)
exact = all(np.array_equal(restored[k], result.params[k]) for k in result.params)
print(f"  {len(restored)} tensors, {len(document)} bytes, exact={exact}")
