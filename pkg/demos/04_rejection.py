"""Decoding with a robustness-rate reject option."""

import numpy as np

from ecocnet import codebook as cb
from ecocnet import decoder as dc
from ecocnet import evaluator as ev

m = cb.one_vs_all(3)
for y in ([0.9, 0.1, 0.2], [0.6, 0.5, 0.1], [0.5, 0.5, 0.0]):
    r = dc.classify_with_reject(y, m, 25.0)
    print(f"y={y}  class={r.predicted_class}  distances={np.round(r.distances, 2)}  "
          f"RR={r.robustness_rate:.1f}  rejected={r.rejected}")

# Noisy outputs around BCH codewords: rejecting low-RR samples trades
# coverage for reliability.
m = cb.bch(15, 31)
rng = np.random.default_rng(0)
labels = rng.integers(0, 15, 2000)
outputs = np.clip(m.entries[labels] + rng.normal(0, 0.55, (2000, 31)), 0, 1)
print(f"{'T':>4} {'recog':>7} {'error':>7} {'reject':>7} {'reliab':>7}")
for t in (0, 10, 25, 50, 75):
    s = ev.score_outputs(outputs, labels, m, t)
    print(f"{t:4d} {s.recognition_rate:7.2f} {s.error_rate:7.2f} "
          f"{s.rejection_rate:7.2f} {s.reliability:7.2f}")
