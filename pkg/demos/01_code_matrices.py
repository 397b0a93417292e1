"""Code matrices: build, inspect, save and reload."""

import numpy as np

from ecocnet import codebook as cb

# One row per class, one column per binary sub-problem.
ova = cb.one_vs_all(5)
print("one-vs-all, 5 classes:")
print(cb.serialize(ova))
print("min row distance:", cb.min_row_distance(ova))  # always 2, so nothing is corrected

# One-vs-one leaves the classes outside each pair as don't-care ('*').
ovo = cb.one_vs_one(4)
print("one-vs-one, 4 classes:")
print(cb.serialize(ovo))

# Longer codes buy error correction.
for name, m in [("exhaustive(6)", cb.exhaustive(6)),
                ("dense(15, 39)", cb.dense_random(15, 39, seed=0)),
                ("sparse(15, 59)", cb.sparse_random(15, 59, seed=0)),
                ("bch(15, 31)", cb.bch(15, 31))]:
    a = cb.analyze(m)
    print(f"{name:15s} shape={m.shape}  d={a.min_row_distance:2d}  t={a.correcting_capability}")

# The BCH rows are codewords m(x) g(x) of a (31, 6) code.
k, t, g = next(p for p in cb.bch_parameters(31) if p[0] == 6)
print(f"(31, {k}) code, t={t}, generator polynomial bits {g:b}")

# Hill climbing can only raise (or keep) the minimum distance.
start = cb.dense_random(8, 20, seed=3, trials=1)
better = cb.hill_climb_improve(start, 2000, seed=0)
print("hill climb:", cb.min_row_distance(start), "->", cb.min_row_distance(better))

# Text round trip.
text = cb.serialize(ovo)
assert cb.deserialize(text) == ovo
print("targets for class 2 under one-vs-one:", cb.encode_targets(2, ovo))
