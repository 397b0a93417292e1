"""PCA representation stage.

Samples are mean-centred (no variance scaling) and projected onto the leading
eigenvectors of their covariance matrix, normalised by ``N - 1``. When there
are more input dimensions than samples the eigenvectors are recovered from
the ``N x N`` Gram matrix instead of the ``l x l`` covariance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimension, RankDeficient

_NEGATIVE_EIGENVALUE_TOL = 1e-10


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # k x l, rows orthonormal, descending eigenvalue
    eigenvalues: np.ndarray

    @property
    def input_dim(self) -> int:
        return self.components.shape[1]

    @property
    def output_dim(self) -> int:
        return self.components.shape[0]


def _orient(components):
    # largest-magnitude entry of every row made positive
    idx = np.abs(components).argmax(axis=1)
    signs = np.sign(components[np.arange(len(components)), idx])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


def pca_fit(samples, k: int) -> PcaModel:
    """Fit a ``k``-component PCA model to an ``N x l`` sample matrix.

    Raises
    ------
    InvalidDimension
        ``N < 2`` or ``k`` outside ``1..min(N-1, l)``.
    RankDeficient
        The centred data spans fewer than ``k`` directions; the exception's
        ``achievable_k`` holds the numerical rank.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InvalidDimension(f"need an N x l sample matrix with N >= 2, got shape {x.shape}")
    n, l = x.shape
    if int(k) != k or not 1 <= k <= min(n - 1, l):
        raise InvalidDimension(f"k must be in 1..{min(n - 1, l)}, got {k!r}")
    if not np.isfinite(x).all():
        raise InvalidDimension("samples contain non-finite values")

    mean = x.mean(axis=0)
    centred = x - mean
    if l > n:
        gram = centred @ centred.T / (n - 1)
        vals, vecs = np.linalg.eigh(gram)
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
        keep = vals > 0
        # right singular vectors: X^T u / ||X^T u||
        comps = (centred.T @ vecs[:, keep]).T
        comps /= np.linalg.norm(comps, axis=1, keepdims=True)
        vals = vals[keep]
    else:
        cov = centred.T @ centred / (n - 1)
        vals, vecs = np.linalg.eigh(cov)
        order = np.argsort(vals)[::-1]
        vals, comps = vals[order], vecs[:, order].T

    if vals.size and vals.min() < -_NEGATIVE_EIGENVALUE_TOL * max(1.0, vals.max()):
        raise ArithmeticError("covariance has a significantly negative eigenvalue")
    vals = np.clip(vals, 0.0, None)
    scale = vals.max() if vals.size else 0.0
    rank = int((vals > max(n, l) * np.finfo(float).eps * scale).sum()) if scale > 0 else 0
    if rank < k:
        raise RankDeficient(f"data has rank {rank}, fewer than k={k} components", rank)

    comps = _orient(comps[:k])
    if l > n:
        # Gram route loses orthogonality only to rounding; re-orthonormalise.
        q, r = np.linalg.qr(comps.T)
        comps = _orient((q * np.sign(np.diag(r))).T)
    return PcaModel(mean=mean, components=comps, eigenvalues=vals[:k].copy())


def pca_project(model: PcaModel, x) -> np.ndarray:
    """Coordinates of ``x`` (one vector or an ``N x l`` batch) in component space."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.input_dim or x.ndim > 2:
        raise InvalidDimension(f"expected trailing dimension {model.input_dim}, got shape {x.shape}")
    return (x - model.mean) @ model.components.T


def pca_reconstruct(model: PcaModel, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != model.output_dim or z.ndim > 2:
        raise InvalidDimension(f"expected trailing dimension {model.output_dim}, got shape {z.shape}")
    return model.mean + z @ model.components
