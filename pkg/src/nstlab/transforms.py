"""Feature-statistics math: Gram/covariance, the loss diagnostics, AdaIN,
whitening / coloring and alpha blending.

Everything here is a pure function over immutable inputs.  Second-moment
matrices and eigen work happen in float64; the Gram matrix is the raw,
unnormalized F F^T while covariance centers rows and divides by M - 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ArgumentError, DegenerateInputError, ShapeError
from .tensor import FeatureMap, FeatureMatrix, center, channel_stats

ADAIN_EPS = 1e-5
# relative eigenvalue floor; smaller eigenpairs are dropped, not clamped
EIG_FLOOR = 1e-5


@dataclass(frozen=True)
class StyleLossWeights:
    """Per-layer style weights plus the content/style mixing weights."""

    layer_weights: tuple[float, ...]
    content_weight: float = 1.0
    style_weight: float = 1e3

    def __post_init__(self):
        w = np.asarray(self.layer_weights, dtype=np.float64)
        if w.size == 0 or not np.isfinite(w).all() or (w < 0).any():
            raise ArgumentError("layer weights must be finite and >= 0")
        if not (w > 0).any():
            raise ArgumentError("at least one layer weight must be positive")
        if not (np.isfinite(self.content_weight) and np.isfinite(self.style_weight)):
            raise ArgumentError("content/style weights must be finite")
        if self.content_weight < 0 or self.style_weight < 0:
            raise ArgumentError("content/style weights must be >= 0")
        object.__setattr__(self, "layer_weights", tuple(float(x) for x in w))

    @classmethod
    def uniform(cls, n_layers: int, **kw) -> "StyleLossWeights":
        return cls(layer_weights=(1.0 / n_layers,) * n_layers, **kw)


@dataclass(frozen=True)
class WctIntermediates:
    """Whitened content features, colored + re-centered features and the
    style mean vector, kept for debugging hooks and tests."""

    whitened: FeatureMatrix
    colored: FeatureMatrix
    style_mean: np.ndarray


def gram(f: FeatureMatrix) -> np.ndarray:
    """G = F F^T, accumulated in float64.  Symmetric PSD by construction."""
    d = f.data.astype(np.float64)
    g = d @ d.T
    return (g + g.T) / 2.0


def covariance(f: FeatureMatrix) -> np.ndarray:
    """Row-centered second moment, normalized by M - 1."""
    if f.cols < 2:
        raise DegenerateInputError(f"covariance needs M >= 2 columns, got {f.cols}")
    centered, _ = center(f)
    d = centered.data
    c = (d @ d.T) / (f.cols - 1)
    return (c + c.T) / 2.0


def content_loss(f: FeatureMap, p: FeatureMap) -> float:
    """Half the summed squared activation difference."""
    if f.data.shape != p.data.shape:
        raise ShapeError(
            f"content_loss shape mismatch: {f.data.shape} vs {p.data.shape}"
        )
    diff = f.data.astype(np.float64) - p.data.astype(np.float64)
    return 0.5 * float(np.sum(diff * diff))


def style_layer_loss(g: np.ndarray, a: np.ndarray, n: int, m: int) -> float:
    """Per-layer Gram mismatch, normalized by 4 N^2 M^2."""
    g = np.asarray(g, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    if g.shape != a.shape:
        raise ShapeError(f"gram shape mismatch: {g.shape} vs {a.shape}")
    diff = g - a
    return float(np.sum(diff * diff)) / (4.0 * n * n * m * m)


def style_loss(
    layer_pairs: Sequence[tuple[np.ndarray, np.ndarray, int, int]],
    weights: StyleLossWeights,
) -> float:
    """Half the weighted sum of per-layer Gram mismatches.

    ``layer_pairs`` holds (G, A, N, M) per style layer, aligned with
    ``weights.layer_weights``.
    """
    if len(layer_pairs) != len(weights.layer_weights):
        raise ArgumentError(
            f"{len(layer_pairs)} layer pairs but {len(weights.layer_weights)} weights"
        )
    total = 0.0
    for w, (g, a, n, m) in zip(weights.layer_weights, layer_pairs):
        total += w * style_layer_loss(g, a, n, m)
    return 0.5 * total


def total_loss(lc: float, ls: float, weights: StyleLossWeights) -> float:
    return weights.content_weight * lc + weights.style_weight * ls


def adain(content: FeatureMap, style: FeatureMap, eps: float = ADAIN_EPS) -> FeatureMap:
    """Shift/scale each content channel to the style channel's mean and variance."""
    if content.channels != style.channels:
        raise ShapeError(
            f"adain channel mismatch: {content.channels} vs {style.channels}"
        )
    mu_c, var_c = channel_stats(content)
    mu_s, var_s = channel_stats(style)
    scale = np.sqrt(var_s) / np.sqrt(var_c + eps)
    x = content.data.astype(np.float64)
    out = scale[:, None, None] * (x - mu_c[:, None, None]) + mu_s[:, None, None]
    return FeatureMap(out.astype(np.float32))


def sym_eig(s: np.ndarray, tol: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix.

    Backed by LAPACK's symmetric solver on a symmetrized private copy;
    the reconstruction and orthonormality contracts are enforced by tests.
    """
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ArgumentError(f"sym_eig expects a square matrix, got shape {s.shape}")
    asym = np.abs(s - s.T).max() if s.size else 0.0
    if asym > tol * max(1.0, np.abs(s).max()):
        raise ArgumentError(f"matrix is not symmetric (max asymmetry {asym:g})")
    vals, vecs = np.linalg.eigh((s + s.T) / 2.0)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def _retained(vals: np.ndarray) -> np.ndarray:
    floor = EIG_FLOOR * max(float(vals[0]), 0.0)
    keep = vals > max(floor, 0.0)
    if not keep.any():
        raise DegenerateInputError("all covariance eigenvalues below the floor")
    return keep


def whiten(f_c: FeatureMatrix) -> tuple[FeatureMatrix, np.ndarray]:
    """Decorrelate centered content features to unit variance.

    Eigenvalues at or below the relative floor are dropped (rank
    truncation).  Returns the whitened matrix and the content mean vector.
    """
    centered, mean_c = center(f_c)
    vals, vecs = sym_eig(covariance(f_c))
    keep = _retained(vals)
    e = vecs[:, keep]
    d = 1.0 / np.sqrt(vals[keep])
    w = (e * d) @ e.T
    return FeatureMatrix(w @ centered.data), mean_c


def color(f_hat: FeatureMatrix, f_s: FeatureMatrix) -> FeatureMatrix:
    """Impose the style features' covariance, then re-center on the style mean."""
    if f_hat.rows != f_s.rows:
        raise ShapeError(f"row mismatch: {f_hat.rows} vs {f_s.rows}")
    _, mean_s = center(f_s)
    vals, vecs = sym_eig(covariance(f_s))
    keep = _retained(vals)
    e = vecs[:, keep]
    d = np.sqrt(vals[keep])
    c = (e * d) @ e.T
    return FeatureMatrix(c @ f_hat.data + mean_s[:, None])


def wct(f_c: FeatureMatrix, f_s: FeatureMatrix) -> WctIntermediates:
    """Whitening then coloring; keeps the intermediates."""
    whitened, _ = whiten(f_c)
    colored = color(whitened, f_s)
    _, mean_s = center(f_s)
    return WctIntermediates(whitened=whitened, colored=colored, style_mean=mean_s)


def wct_blend(f_c: FeatureMatrix, f_cs: FeatureMatrix, alpha: float) -> FeatureMatrix:
    """Convex mix alpha * transformed + (1 - alpha) * original."""
    if not 0.0 <= alpha <= 1.0:
        raise ArgumentError(f"alpha must be in [0, 1], got {alpha}")
    if f_c.data.shape != f_cs.data.shape:
        raise ShapeError(
            f"blend shape mismatch: {f_c.data.shape} vs {f_cs.data.shape}"
        )
    if alpha == 0.0:
        return f_c
    if alpha == 1.0:
        return f_cs
    return FeatureMatrix(alpha * f_cs.data + (1.0 - alpha) * f_c.data)
