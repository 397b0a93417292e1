"""Multiclass classification with error-correcting output codes and a single MLP.

Modules
-------
codebook
    Code-matrix generators, validation, analysis and text serialization.
features
    PCA fitted by eigendecomposition of the sample covariance.
network
    Sigmoid MLP with standard and error-weighted back-propagation.
decoder
    L1 nearest-codeword decoding and robustness-rate rejection.
evaluator
    Gm/Pn splits and recognition/error/rejection/reliability rates.
dataset
    CSV, PGM image-directory and synthetic corpora.
harness
    Command-line entry point and experiment configuration.
"""

from . import codebook, dataset, decoder, evaluator, features, network
from .codebook import DONT_CARE, CodeAnalysis, CodeMatrix
from .dataset import Dataset, SyntheticSpec, generate_synthetic
from .decoder import DecodeResult, classify, classify_with_reject, robustness_rate
from .errors import EcocError
from .evaluator import EvaluationReport, SplitResult, SplitSpec, run_experiment
from .features import PcaModel, pca_fit, pca_project, pca_reconstruct
from .network import CostVariant, Mlp, TrainConfig, TrainTrace, UpdateMode

__version__ = "0.1.0"

__all__ = [
    "DONT_CARE", "CodeAnalysis", "CodeMatrix", "CostVariant", "Dataset", "DecodeResult",
    "EcocError", "EvaluationReport", "Mlp", "PcaModel", "SplitResult", "SplitSpec",
    "SyntheticSpec", "TrainConfig", "TrainTrace", "UpdateMode", "classify",
    "classify_with_reject", "codebook", "dataset", "decoder", "evaluator", "features",
    "generate_synthetic", "network", "pca_fit", "pca_project", "pca_reconstruct",
    "robustness_rate", "run_experiment",
]
