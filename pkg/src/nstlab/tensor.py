"""Dense activation / image containers and the statistics they all share.

Layout conventions, used everywhere in the engine:

* ``FeatureMap``  -- (C, H, W), row-major C -> H -> W, float32.
* ``FeatureMatrix`` -- (N, M) with one flattened channel per row,
  N = C and M = H * W.  float32 or float64 (whitening works in f64).
* ``Image`` -- (H, W, 3) RGB in [0, 1], float32.

Values are treated as immutable after construction; the wrapped numpy
buffers are marked read-only so accidental in-place edits fail loudly.
Means and other accumulations are computed in float64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FeatureMap:
    """A C x H x W activation tensor."""

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float32)
        if d.ndim != 3:
            raise ShapeError(f"FeatureMap expects (C, H, W), got shape {d.shape}")
        if not np.isfinite(d).all():
            raise ShapeError("FeatureMap contains NaN or Inf")
        object.__setattr__(self, "data", _freeze(d))

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class FeatureMatrix:
    """The N x M vectorized view of a feature map (one channel per row)."""

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data)
        if d.dtype not in (np.float32, np.float64):
            d = d.astype(np.float32)
        if d.ndim != 2:
            raise ShapeError(f"FeatureMatrix expects (N, M), got shape {d.shape}")
        if not np.isfinite(d).all():
            raise ShapeError("FeatureMatrix contains NaN or Inf")
        object.__setattr__(self, "data", _freeze(d))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class Image:
    """An H x W x 3 RGB raster with values in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float32)
        if d.ndim != 3 or d.shape[2] != 3:
            raise ShapeError(f"Image expects (H, W, 3), got shape {d.shape}")
        if not np.isfinite(d).all():
            raise ShapeError("Image contains NaN or Inf")
        d = np.clip(d, 0.0, 1.0)
        object.__setattr__(self, "data", _freeze(d))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


def to_matrix(f: FeatureMap) -> FeatureMatrix:
    """Flatten each channel of ``f`` to one row (row-major spatial order)."""
    c = f.channels
    return FeatureMatrix(f.data.reshape(c, -1))


def from_matrix(m: FeatureMatrix, height: int, width: int) -> FeatureMap:
    """Inverse of :func:`to_matrix`; needs the original spatial shape."""
    if m.cols != height * width:
        raise ShapeError(
            f"cannot reshape {m.rows}x{m.cols} matrix to spatial {height}x{width}"
        )
    return FeatureMap(np.asarray(m.data, dtype=np.float32).reshape(m.rows, height, width))


def channel_stats(f: FeatureMap) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel (mean, population variance), accumulated in float64."""
    flat = f.data.reshape(f.channels, -1).astype(np.float64)
    mean = flat.mean(axis=1)
    var = flat.var(axis=1)  # population convention: divide by H*W
    return mean, np.maximum(var, 0.0)


def center(m: FeatureMatrix) -> tuple[FeatureMatrix, np.ndarray]:
    """Subtract each row's mean; returns the centered matrix and the mean vector.

    Centering is done in float64 so residual row sums stay near machine
    epsilon even for long rows.
    """
    d = m.data.astype(np.float64)
    mean = d.mean(axis=1)
    return FeatureMatrix(d - mean[:, None]), mean
