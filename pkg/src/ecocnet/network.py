"""Monolithic three-layer sigmoid MLP with one output unit per code bit.

Two training costs are supported over a training set of ``N`` samples, with
per-sample codeword error ``e_i = sum_j (y_ij - d_ij)**2``:

* standard:  ``E  = (1/N) sum_i e_i``
* weighted:  ``Eb = (1/N) sum_i w_i e_i`` with ``w_i = e_i``

Don't-care target positions (masked entries) are left out of every sum.

For the weighted cost the weight ``w_i`` is treated as a constant during
back-propagation: the output delta of sample ``i`` is the standard delta
scaled by ``w_i``. Because ``w_i = e_i`` this is exactly half the true
gradient of ``Eb``; the factor only rescales the step size.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.special import expit

from .errors import EmptyInput, InvalidDimension, TrainingDiverged


class CostVariant(str, enum.Enum):
    STANDARD = "standard"
    WEIGHTED = "weighted"


class UpdateMode(str, enum.Enum):
    PER_SAMPLE = "per_sample"
    FULL_BATCH = "full_batch"


@dataclass
class Mlp:
    """Weights of a ``input -> hidden -> output`` sigmoid network.

    The last row of each weight matrix holds the biases.
    """

    hidden_weights: np.ndarray  # (input_dim + 1) x hidden_dim
    output_weights: np.ndarray  # (hidden_dim + 1) x output_dim

    def __post_init__(self):
        self.hidden_weights = np.asarray(self.hidden_weights, dtype=float)
        self.output_weights = np.asarray(self.output_weights, dtype=float)
        if self.hidden_weights.ndim != 2 or self.output_weights.ndim != 2:
            raise InvalidDimension("weight matrices must be 2-D")
        if self.output_weights.shape[0] != self.hidden_weights.shape[1] + 1:
            raise InvalidDimension(
                f"output weights need {self.hidden_weights.shape[1] + 1} rows, "
                f"got {self.output_weights.shape[0]}"
            )

    @property
    def input_dim(self) -> int:
        return self.hidden_weights.shape[0] - 1

    @property
    def hidden_dim(self) -> int:
        return self.hidden_weights.shape[1]

    @property
    def output_dim(self) -> int:
        return self.output_weights.shape[1]

    def copy(self) -> Mlp:
        return Mlp(self.hidden_weights.copy(), self.output_weights.copy())


class Gradient(NamedTuple):
    hidden: np.ndarray
    output: np.ndarray


@dataclass(frozen=True)
class TrainConfig:
    """Plain gradient descent settings.

    The step size at epoch ``k`` (0-based) is ``learning_rate * decay**k``.
    ``init_scale`` is only consulted by callers that build a fresh network.
    """

    cost_variant: CostVariant = CostVariant.WEIGHTED
    epochs: int = 150
    learning_rate: float = 0.05
    decay: float = 1.0
    seed: int = 0
    update_mode: UpdateMode = UpdateMode.PER_SAMPLE
    init_scale: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "cost_variant", CostVariant(self.cost_variant))
        object.__setattr__(self, "update_mode", UpdateMode(self.update_mode))
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError(f"epochs must be a positive integer, got {self.epochs!r}")
        if not self.learning_rate > 0 or not self.decay > 0:
            raise ValueError("learning_rate and decay must be positive")
        if self.init_scale is not None and self.init_scale < 0:
            raise ValueError("init_scale must be non-negative")

    def step_size(self, epoch: int) -> float:
        return self.learning_rate * self.decay ** epoch

    def with_seed(self, seed: int) -> TrainConfig:
        return replace(self, seed=seed)


@dataclass
class TrainTrace:
    standard: list = field(default_factory=list)
    weighted: list = field(default_factory=list)

    def __len__(self):
        return len(self.standard)


def init(input_dim: int, hidden_dim: int, code_length: int, seed: int = 0,
         init_scale: float | None = None) -> Mlp:
    """Uniform ``[-r, r]`` weights; ``r`` defaults to ``1/sqrt(fan_in)`` per layer."""
    dims = (input_dim, hidden_dim, code_length)
    if any(int(d) != d or d < 1 for d in dims):
        raise InvalidDimension(f"network dimensions must be positive integers, got {dims}")
    rng = np.random.default_rng(seed)
    r1 = 1.0 / np.sqrt(input_dim) if init_scale is None else init_scale
    r2 = 1.0 / np.sqrt(hidden_dim) if init_scale is None else init_scale
    w1 = rng.uniform(-r1, r1, size=(input_dim + 1, hidden_dim))
    w2 = rng.uniform(-r2, r2, size=(hidden_dim + 1, code_length))
    return Mlp(w1, w2)


def _affine(x, w):
    return x @ w[:-1] + w[-1]


def _check_inputs(net, x):
    x = np.asarray(x, dtype=float)
    if x.ndim not in (1, 2) or x.shape[-1] != net.input_dim:
        raise InvalidDimension(f"expected inputs with {net.input_dim} features, got shape {x.shape}")
    return x


def _hidden_and_output(net, x):
    h = expit(_affine(x, net.hidden_weights))
    return h, expit(_affine(h, net.output_weights))


def forward(net: Mlp, u) -> np.ndarray:
    """Output activations for one input vector or an ``N x input_dim`` batch."""
    u = _check_inputs(net, u)
    return _hidden_and_output(net, u)[1]


def _split_targets(targets, shape):
    data = np.ma.getdata(targets).astype(float)
    active = ~np.ma.getmaskarray(targets)
    if data.shape != shape:
        raise InvalidDimension(f"targets have shape {data.shape}, outputs {shape}")
    return data, active


def _residuals(net, x, targets):
    x = _check_inputs(net, x)
    batch = np.atleast_2d(x)
    if batch.shape[0] == 0:
        raise EmptyInput("empty dataset")
    h, y = _hidden_and_output(net, batch)
    t = targets if np.ndim(targets) == 2 else np.ma.atleast_2d(targets)
    d, active = _split_targets(t, y.shape)
    return batch, h, y, np.where(active, y - d, 0.0)


def codeword_errors(net: Mlp, x, targets) -> np.ndarray:
    """Per-sample squared codeword error ``e_i`` over non-masked positions."""
    r = _residuals(net, x, targets)[3]
    return (r ** 2).sum(axis=1)


def sample_weight(net: Mlp, u, d) -> float:
    """Weight of one sample in the weighted cost: its own codeword error."""
    return float(codeword_errors(net, np.atleast_2d(u), np.ma.atleast_2d(d))[0])


def cost_standard(net: Mlp, x, targets) -> float:
    return float(codeword_errors(net, x, targets).mean())


def cost_weighted(net: Mlp, x, targets) -> float:
    return float((codeword_errors(net, x, targets) ** 2).mean())


def _backprop(net, x, h, y, out_grad):
    """Weight gradients given dCost/dy for a batch."""
    delta_out = out_grad * y * (1.0 - y)
    g2 = np.empty_like(net.output_weights)
    g2[:-1] = h.T @ delta_out
    g2[-1] = delta_out.sum(axis=0)
    delta_hid = (delta_out @ net.output_weights[:-1].T) * h * (1.0 - h)
    g1 = np.empty_like(net.hidden_weights)
    g1[:-1] = x.T @ delta_hid
    g1[-1] = delta_hid.sum(axis=0)
    return Gradient(g1, g2)


def gradient(net: Mlp, x, targets, cost_variant=CostVariant.STANDARD) -> Gradient:
    """Back-propagated gradient of the chosen cost over a batch.

    ``STANDARD`` returns dE/dw exactly. ``WEIGHTED`` scales each sample's
    output delta by its codeword error, held constant, which equals
    ``0.5 * dEb/dw``.
    """
    cost_variant = CostVariant(cost_variant)
    batch, h, y, r = _residuals(net, x, targets)
    out_grad = (2.0 / batch.shape[0]) * r
    if cost_variant is CostVariant.WEIGHTED:
        out_grad *= (r ** 2).sum(axis=1, keepdims=True)
    return _backprop(net, batch, h, y, out_grad)


def train(net: Mlp, x, targets, config: TrainConfig) -> tuple[Mlp, TrainTrace]:
    """Gradient descent ``w <- w - eta_k * g``; returns a trained copy and its trace.

    ``PER_SAMPLE`` visits the samples in a fresh seeded permutation each epoch
    and updates after every sample, using that sample's weight from the same
    forward pass. ``FULL_BATCH`` takes one step per epoch. Both costs are
    recorded on the whole training set after every epoch.

    Raises
    ------
    TrainingDiverged
        If either recorded cost becomes non-finite.
    """
    x = _check_inputs(net, x)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyInput("training set is empty")
    data, active = _split_targets(targets, (x.shape[0], net.output_dim))
    targets = np.ma.MaskedArray(data, mask=~active)
    net = net.copy()
    weighted = config.cost_variant is CostVariant.WEIGHTED
    rng = np.random.default_rng(config.seed)
    trace = TrainTrace()
    with np.errstate(over="ignore", invalid="ignore"):
        _run_epochs(net, x, data, active, targets, config, weighted, rng, trace)
    return net, trace


def _run_epochs(net, x, data, active, targets, config, weighted, rng, trace):
    w1, w2 = net.hidden_weights, net.output_weights
    for epoch in range(config.epochs):
        eta = config.step_size(epoch)
        if config.update_mode is UpdateMode.FULL_BATCH:
            g = gradient(net, x, targets, config.cost_variant)
            w1 -= eta * g.hidden
            w2 -= eta * g.output
        else:
            for i in rng.permutation(x.shape[0]):
                u = x[i]
                h = expit(u @ w1[:-1] + w1[-1])
                y = expit(h @ w2[:-1] + w2[-1])
                r = np.where(active[i], y - data[i], 0.0)
                delta_out = 2.0 * r * y * (1.0 - y)
                if weighted:
                    delta_out *= r @ r
                delta_hid = (w2[:-1] @ delta_out) * h * (1.0 - h)
                w2[:-1] -= eta * np.outer(h, delta_out)
                w2[-1] -= eta * delta_out
                w1[:-1] -= eta * np.outer(u, delta_hid)
                w1[-1] -= eta * delta_hid

        errors = codeword_errors(net, x, targets)
        e_std, e_wtd = float(errors.mean()), float((errors ** 2).mean())
        if not (np.isfinite(e_std) and np.isfinite(e_wtd)):
            raise TrainingDiverged(
                f"non-finite cost at epoch {epoch}", last_finite_epoch=epoch - 1
            )
        trace.standard.append(e_std)
        trace.weighted.append(e_wtd)
