import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ecocnet import codebook as cb
from ecocnet import decoder as dc
from ecocnet.codebook import DONT_CARE, CodeMatrix
from ecocnet.errors import InvalidDimension


def naive_distances(y, z):
    return [sum(abs(zij - yj) for zij, yj in zip(row, y) if zij != DONT_CARE) for row in z]


def naive_rr(y, z):
    """Robustness rate by full sort of (distance, index) pairs, plain Python."""
    dist = naive_distances(y, z.tolist())
    (l1, i1), (l2, i2) = sorted((d, i) for i, d in enumerate(dist))[:2]
    hd = sum(1 for a, b in zip(z[i1], z[i2]) if a != DONT_CARE and b != DONT_CARE and a != b)
    return (l2 - l1) / hd * 100


MATRICES = [cb.one_vs_all(5), cb.exhaustive(4), cb.bch(15, 15), cb.dense_random(10, 20, seed=1),
            cb.one_vs_one(5), cb.sparse_random(12, 40, seed=2)]


def test_distance_examples():
    m = cb.one_vs_all(3)
    assert dc.distances(m.entries[1].astype(float), m)[1] == 0.0
    assert dc.distances([0.9, 0.1, 0.2], m)[0] == pytest.approx(0.4)
    m = cb.bch(15, 31)
    np.testing.assert_allclose(dc.distances(np.full(31, 0.5), m), 15.5)


def test_distances_skip_masked():
    m = cb.one_vs_one(3)
    np.testing.assert_allclose(dc.distances([1.0, 1.0, 0.5], m), [0.0, 1.5, 1.5])


def test_classify_examples():
    m = cb.one_vs_all(3)
    assert dc.classify([0.0, 0.0, 1.0], m) == 2
    assert dc.classify(np.full(15, 0.5), cb.bch(15, 15)) == 0


@pytest.mark.parametrize("m", MATRICES, ids=repr)
def test_classify_matches_enumeration(m):
    rng = np.random.default_rng(0)
    for y in rng.random((200, m.code_length)):
        dist = naive_distances(y, m.entries.tolist())
        assert dc.classify(y, m) == dist.index(min(dist))


def test_dimension_mismatch():
    with pytest.raises(InvalidDimension):
        dc.distances(np.zeros(4), cb.one_vs_all(3))


def test_rr_at_codeword_is_100():
    m = cb.bch(15, 31)
    for row in m.entries:
        assert dc.robustness_rate(row.astype(float), m) == 100.0


def test_rr_equidistant_is_zero():
    m = cb.one_vs_all(3)
    assert dc.robustness_rate([0.5, 0.5, 0.0], m) == 0.0


@pytest.mark.parametrize("m", MATRICES[:4], ids=repr)
def test_rr_matches_naive_binary(m):
    rng = np.random.default_rng(1)
    ys = rng.random((300, m.code_length))
    batch = dc.robustness_rate(ys, m)
    for y, rr in zip(ys, batch):
        assert rr == pytest.approx(naive_rr(y, m.entries), abs=1e-9)
        assert 0.0 <= rr <= 100.0


def test_rr_ternary_capped():
    # raw ratio would be 150: closest codewords overlap in one position only
    m = cb.one_vs_one(3)
    assert naive_rr([1.0, 1.0, 0.5], m.entries) == pytest.approx(150.0)
    assert dc.robustness_rate([1.0, 1.0, 0.5], m) == 100.0


@st.composite
def binary_matrices(draw):
    """Valid binary matrices: columns are distinct patterns up to complement."""
    c = draw(st.integers(3, 8))
    top = 2 ** (c - 1) - 1
    patterns = draw(st.lists(st.integers(1, top), min_size=2, max_size=min(12, top), unique=True))
    flips = draw(st.lists(st.booleans(), min_size=len(patterns), max_size=len(patterns)))
    z = np.array([[(p >> (r - 1)) & 1 if r else 0 for r in range(c)] for p in patterns]).T
    z = np.where(flips, 1 - z, z).astype(np.int8)
    assume(cb.is_valid(CodeMatrix(z)))
    return z


@settings(max_examples=200, deadline=None)
@given(binary_matrices(), st.data())
def test_rr_bounds_property(z, data):
    m = CodeMatrix(z)
    y = data.draw(arrays(float, m.code_length, elements=st.floats(0, 1)))
    raw = naive_rr(y, z)
    assert -1e-9 <= raw <= 100 + 1e-9
    assert 0.0 <= dc.robustness_rate(y, m) <= 100.0


@settings(max_examples=200, deadline=None)
@given(binary_matrices(), st.data())
def test_binary_corner_is_hamming(z, data):
    m = CodeMatrix(z)
    y = np.array(data.draw(st.lists(st.integers(0, 1), min_size=m.code_length,
                                    max_size=m.code_length)))
    hamming = [int((row != y).sum()) for row in z]
    np.testing.assert_array_equal(dc.distances(y.astype(float), m), hamming)


@settings(max_examples=100, deadline=None)
@given(binary_matrices(), st.data())
def test_classify_permutation_equivariant(z, data):
    perm = np.array(data.draw(st.permutations(range(z.shape[0]))))
    y = data.draw(arrays(float, z.shape[1], elements=st.floats(0, 1)))
    dist = dc.distances(y, CodeMatrix(z))
    if np.sort(dist)[0] == np.sort(dist)[1]:
        return  # tie-break by index is not permutation-invariant
    assert perm[dc.classify(y, CodeMatrix(z[perm]))] == dc.classify(y, CodeMatrix(z))


def test_flips_within_capability_decode_correctly():
    m = cb.bch(15, 15)
    t = cb.analyze(m).correcting_capability
    for i, row in enumerate(m.entries):
        for flips in itertools.combinations(range(15), t):
            y = row.astype(float)
            y[list(flips)] = 1 - y[list(flips)]
            assert dc.classify(y, m) == i


def test_classify_with_reject():
    m = cb.one_vs_all(3)
    res = dc.classify_with_reject([0.9, 0.1, 0.2], m, 25.0)
    assert res.predicted_class == 0
    assert res.robustness_rate == pytest.approx(naive_rr([0.9, 0.1, 0.2], m.entries))
    assert not res.rejected
    res = dc.classify_with_reject([0.6, 0.5, 0.1], m, 25.0)
    assert res.predicted_class == 0 and res.rejected


def test_threshold_zero_rejects_nothing():
    m = cb.bch(15, 31)
    ys = np.random.default_rng(2).random((500, 31))
    _, _, rejected = dc.decode_batch(ys, m, 0.0)
    assert not rejected.any()


def test_threshold_100_rejects_off_codeword():
    m = cb.bch(15, 31)
    assert not dc.classify_with_reject(m.entries[4].astype(float), m, 100.0).rejected
    y = m.entries[4].astype(float)
    y[0] = 0.5
    assert dc.classify_with_reject(y, m, 100.0).rejected


@pytest.mark.parametrize("bad", [-1.0, 100.0 + 1e-9])
def test_threshold_range(bad):
    with pytest.raises(ValueError):
        dc.classify_with_reject(np.zeros(3), cb.one_vs_all(3), bad)


def test_decode_batch_agrees_with_single():
    m = cb.sparse_random(15, 59, seed=0)
    ys = np.random.default_rng(3).random((50, 59))
    pred, rr, rej = dc.decode_batch(ys, m, 25.0)
    for y, p, r, j in zip(ys, pred, rr, rej):
        res = dc.classify_with_reject(y, m, 25.0)
        assert (res.predicted_class, res.robustness_rate, res.rejected) == (p, r, j)
