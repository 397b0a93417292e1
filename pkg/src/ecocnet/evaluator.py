"""Gm/Pn split protocol and recognition / error / rejection / reliability rates.

``Gm/Pn`` draws ``m`` training and ``n`` test samples per class at random,
without replacement. Every split has its own random stream derived from
``(seed, split_index)``, so splits can be computed in any order or in
parallel with identical results.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import decoder, features, network
from .codebook import CodeMatrix, encode_labels
from .dataset import Dataset
from .errors import EmptyInput, InsufficientData

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitSpec:
    train_per_class: int
    test_per_class: int
    split_count: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.train_per_class < 1 or self.test_per_class < 1 or self.split_count < 1:
            raise ValueError("train_per_class, test_per_class and split_count must be >= 1")

    @property
    def name(self) -> str:
        return f"G{self.train_per_class}/P{self.test_per_class}"


@dataclass(frozen=True)
class SplitResult:
    recognition_rate: float
    error_rate: float
    rejection_rate: float
    reliability: Optional[float]  # None when every sample was rejected
    sample_count: int


@dataclass(frozen=True)
class EvaluationReport:
    splits: tuple

    def _mean(self, attr):
        return float(np.mean([getattr(s, attr) for s in self.splits]))

    @property
    def recognition_rate(self) -> float:
        return self._mean("recognition_rate")

    @property
    def error_rate(self) -> float:
        return self._mean("error_rate")

    @property
    def rejection_rate(self) -> float:
        return self._mean("rejection_rate")

    @property
    def reliability(self) -> Optional[float]:
        """Mean over the splits where reliability is defined."""
        values = [s.reliability for s in self.splits if s.reliability is not None]
        return float(np.mean(values)) if values else None


def _split_rng(seed, split_index, stream=0):
    return np.random.default_rng([seed, split_index, stream])


def derived_seed(seed: int, split_index: int, salt: int = 0) -> int:
    return int(np.random.SeedSequence([seed, split_index, salt]).generate_state(1)[0])


def split_gm_pn(dataset: Dataset, spec: SplitSpec, split_index: int) -> tuple[Dataset, Dataset]:
    """Per class, ``m`` random samples for training and ``n`` of the rest for testing."""
    need = spec.train_per_class + spec.test_per_class
    rng = _split_rng(spec.seed, split_index)
    train_idx, test_idx = [], []
    for c in range(dataset.class_count):
        members = np.flatnonzero(dataset.labels == c)
        if members.size < need:
            raise InsufficientData(
                f"class {c} has {members.size} samples, {spec.name} needs {need}"
            )
        chosen = rng.permutation(members)
        train_idx.extend(chosen[:spec.train_per_class])
        test_idx.extend(chosen[spec.train_per_class:need])
    return dataset.subset(sorted(train_idx)), dataset.subset(sorted(test_idx))


def score_outputs(outputs, labels, matrix: CodeMatrix, threshold: float) -> SplitResult:
    """Rates in percent for network outputs on a labelled test set."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise EmptyInput("empty test set")
    pred, _, rejected = decoder.decode_batch(outputs, matrix, threshold)
    accepted = ~rejected
    n = labels.size
    correct = int((accepted & (pred == labels)).sum())
    wrong = int((accepted & (pred != labels)).sum())
    recognition = 100.0 * correct / n
    error = 100.0 * wrong / n
    rejection = 100.0 * int(rejected.sum()) / n
    reliability = 100.0 * correct / (correct + wrong) if correct + wrong else None
    return SplitResult(recognition, error, rejection, reliability, n)


def evaluate(net: network.Mlp, test: Dataset, matrix: CodeMatrix,
             threshold: float = 0.0) -> EvaluationReport:
    if len(test) == 0:
        raise EmptyInput("empty test set")
    outputs = network.forward(net, test.features)
    return EvaluationReport((score_outputs(outputs, test.labels, matrix, threshold),))


@dataclass(frozen=True)
class SplitOutputs:
    """Test-set outputs of the network trained on one split."""

    outputs: np.ndarray
    labels: np.ndarray
    pca_k: Optional[int]


def effective_pca_k(pca_k, train_size, dim):
    if pca_k is None:
        return None
    k = min(pca_k, train_size - 1, dim)
    if k < pca_k:
        log.warning("pca_k=%d capped to %d for %d training samples of dimension %d",
                    pca_k, k, train_size, dim)
    return k


def train_split(dataset, matrix, train_config, spec, split_index, hidden_dim, pca_k=None):
    """Fit PCA (optional) and a fresh network on one split; return its test outputs."""
    train, test = split_gm_pn(dataset, spec, split_index)
    x_train, x_test = train.features, test.features
    k = effective_pca_k(pca_k, len(train), dataset.dim)
    if k is not None:
        model = features.pca_fit(x_train, k)
        x_train, x_test = features.pca_project(model, x_train), features.pca_project(model, x_test)
    config = train_config.with_seed(derived_seed(spec.seed, split_index, train_config.seed))
    net = network.init(x_train.shape[1], hidden_dim, matrix.code_length,
                       seed=derived_seed(spec.seed, split_index, train_config.seed + 1),
                       init_scale=train_config.init_scale)
    net, _ = network.train(net, x_train, encode_labels(train.labels, matrix), config)
    return SplitOutputs(network.forward(net, x_test), test.labels, k)


def _train_split_star(args):
    return train_split(*args)


def experiment_outputs(dataset, matrix, train_config, spec, hidden_dim, pca_k=None,
                       workers=1) -> list[SplitOutputs]:
    """Per-split test outputs, in split order regardless of ``workers``."""
    jobs = [(dataset, matrix, train_config, spec, i, hidden_dim, pca_k)
            for i in range(spec.split_count)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_train_split_star, jobs))
    return [train_split(*job) for job in jobs]


def report_from_outputs(split_outputs, matrix, threshold) -> EvaluationReport:
    return EvaluationReport(tuple(
        score_outputs(s.outputs, s.labels, matrix, threshold) for s in split_outputs
    ))


def run_experiment(dataset: Dataset, matrix: CodeMatrix, train_config: network.TrainConfig,
                   spec: SplitSpec, threshold: float = 0.0, *, hidden_dim: int = 30,
                   pca_k: Optional[int] = None, workers: int = 1) -> EvaluationReport:
    """Train and evaluate a fresh network on each of ``spec.split_count`` splits.

    With ``pca_k`` set, PCA is fitted on each split's training samples; ``k``
    is capped at ``min(pca_k, train_size - 1, dim)``.
    """
    outs = experiment_outputs(dataset, matrix, train_config, spec, hidden_dim, pca_k, workers)
    return report_from_outputs(outs, matrix, threshold)
