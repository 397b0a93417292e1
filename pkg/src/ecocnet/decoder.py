"""Minimum-distance decoding, robustness rate and threshold rejection.

The distance between an output vector ``y`` and codeword ``i`` is the L1
distance over the codeword's non-masked positions. The robustness rate of a
decision is the gap between the second-closest and closest codeword
distances, as a percentage of the Hamming distance between those two
codewords. On binary corners ``y in {0,1}^b`` the L1 distance is the Hamming
distance, so decoding reduces to nearest-codeword decoding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import CodeMatrix, pairwise_distances
from .errors import InvalidDimension, InvalidMatrix


@dataclass(frozen=True)
class DecodeResult:
    predicted_class: int
    distances: np.ndarray
    robustness_rate: float
    rejected: bool


def _outputs(y, matrix):
    y = np.asarray(y, dtype=float)
    if y.shape[-1:] != (matrix.code_length,) or y.ndim > 2:
        raise InvalidDimension(f"expected outputs of length {matrix.code_length}, got shape {y.shape}")
    return y


def distances(y, matrix: CodeMatrix) -> np.ndarray:
    """L1 distance from ``y`` to every codeword; shape ``(C,)`` or ``(N, C)`` for a batch."""
    y = _outputs(y, matrix)
    z = matrix.entries.astype(float)
    active = matrix.active
    diff = np.abs(z - y[..., None, :])
    return np.where(active, diff, 0.0).sum(axis=-1)


def classify(y, matrix: CodeMatrix):
    """Index of the closest codeword; ties go to the lowest class index."""
    return np.argmin(distances(y, matrix), axis=-1)


def _two_closest(dist):
    order = np.argsort(dist, axis=-1, kind="stable")
    return order[..., 0], order[..., 1]


def robustness_rate(y, matrix: CodeMatrix):
    """Robustness rate (percent) of the minimum-distance decision for ``y``.

    For binary matrices the value lies in [0, 100] by the triangle inequality
    and the final clip only absorbs rounding. With don't-care entries the two
    distances may run over different positions, so the raw ratio can exceed
    100; it is capped there.
    """
    dist = distances(y, matrix)
    first, second = _two_closest(dist)
    hd = pairwise_distances(matrix)[first, second]
    if np.any(hd == 0):
        raise InvalidMatrix("closest codewords are indistinguishable")
    gap = np.take_along_axis(dist, np.stack([first, second], axis=-1), axis=-1)
    rr = np.clip((gap[..., 1] - gap[..., 0]) / hd * 100.0, 0.0, 100.0)
    return float(rr) if np.ndim(rr) == 0 else rr


def classify_with_reject(y, matrix: CodeMatrix, threshold_percent: float) -> DecodeResult:
    """Decode ``y`` and reject the decision when its robustness rate is below the threshold.

    The predicted class is filled in even for rejected samples.
    """
    if not 0.0 <= threshold_percent <= 100.0:
        raise ValueError(f"threshold must be within [0, 100], got {threshold_percent}")
    y = _outputs(y, matrix)
    if y.ndim != 1:
        raise InvalidDimension("classify_with_reject takes a single output vector")
    dist = distances(y, matrix)
    rr = robustness_rate(y, matrix)
    return DecodeResult(
        predicted_class=int(np.argmin(dist)),
        distances=dist,
        robustness_rate=rr,
        rejected=bool(rr < threshold_percent),
    )


def decode_batch(outputs, matrix: CodeMatrix, threshold_percent: float = 0.0):
    """Vectorised :func:`classify_with_reject`: ``(predicted, rr, rejected)`` arrays."""
    if not 0.0 <= threshold_percent <= 100.0:
        raise ValueError(f"threshold must be within [0, 100], got {threshold_percent}")
    outputs = np.atleast_2d(_outputs(outputs, matrix))
    pred = classify(outputs, matrix)
    rr = np.atleast_1d(robustness_rate(outputs, matrix))
    return pred, rr, rr < threshold_percent
