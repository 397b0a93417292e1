"""Standard vs. error-weighted back-propagation on one training set."""

import numpy as np

from ecocnet import codebook as cb
from ecocnet import network as nw
from ecocnet.dataset import generate_synthetic

data = generate_synthetic()
matrix = cb.bch(15, 31)
targets = cb.encode_labels(data.labels, matrix)
print("training set:", data.features.shape, "targets:", targets.shape)

# In the weighted cost each sample counts in proportion to its own error,
# so badly fitted samples pull harder on the weights.
net0 = nw.init(data.dim, 30, matrix.code_length, seed=1)
errors = nw.codeword_errors(net0, data.features, targets)
print(f"initial per-sample errors: min={errors.min():.2f} max={errors.max():.2f}")

for variant in ("standard", "weighted"):
    cfg = nw.TrainConfig(cost_variant=variant, epochs=60, learning_rate=0.05)
    net, trace = nw.train(net0, data.features, targets, cfg)
    e = nw.codeword_errors(net, data.features, targets)
    print(f"{variant:8s}  E={trace.standard[-1]:.4f}  Ebar={trace.weighted[-1]:.4f}  "
          f"worst sample={e.max():.3f}")

# The weighted gradient is half the true gradient of Ebar.
small = data.subset(np.arange(10))
net = nw.init(data.dim, 5, 31, seed=2)
g = nw.gradient(net, small.features, targets[:10], "weighted")
eps, idx = 1e-5, (0, 0)
w = net.output_weights
w[idx] += eps
up = nw.cost_weighted(net, small.features, targets[:10])
w[idx] -= 2 * eps
down = nw.cost_weighted(net, small.features, targets[:10])
w[idx] += eps
print("2 x analytic:", 2 * g.output[idx], " finite difference:", (up - down) / (2 * eps))
