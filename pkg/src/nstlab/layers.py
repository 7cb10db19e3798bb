"""Forward-only CNN layer primitives.

conv2d uses an im2col + single sgemm path; a naive quadruple-loop oracle
lives in the test suite and the two must agree within 1e-5.  Max-pooling
records per-window argmax offsets so the photorealistic decoders can
unpool into the exact positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ArgumentError, ShapeError
from .tensor import FeatureMap


@dataclass(frozen=True)
class PoolIndices:
    """Argmax offsets (0..3, row-major inside each 2x2 window) per pool layer.

    ``offsets[k]`` has shape (C, H_k/2, W_k/2) for the k-th pooling layer
    in encoder order.
    """

    offsets: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.offsets)


def conv2d(x: FeatureMap, kernel: np.ndarray, bias: np.ndarray) -> FeatureMap:
    """Stride-1 cross-correlation with reflection padding.

    kernel: (out_ch, in_ch, kH, kW) with kH == kW in {1, 3};
    output spatial size equals input spatial size.
    """
    kernel = np.asarray(kernel, dtype=np.float32)
    bias = np.asarray(bias, dtype=np.float32)
    if kernel.ndim != 4:
        raise ShapeError(f"kernel must be 4-D, got shape {kernel.shape}")
    out_ch, in_ch, kh, kw = kernel.shape
    if kh != kw or kh not in (1, 3):
        raise ShapeError(f"only 1x1 and 3x3 kernels supported, got {kh}x{kw}")
    if in_ch != x.channels:
        raise ShapeError(
            f"kernel expects {in_ch} input channels, feature map has {x.channels}"
        )
    if bias.shape != (out_ch,):
        raise ShapeError(f"bias must have shape ({out_ch},), got {bias.shape}")

    c, h, w = x.data.shape
    if kh == 1:
        flat = kernel.reshape(out_ch, in_ch) @ x.data.reshape(c, h * w)
        out = flat.reshape(out_ch, h, w) + bias[:, None, None]
        return FeatureMap(out)

    pad = kh // 2
    xp = np.pad(x.data, ((0, 0), (pad, pad), (pad, pad)), mode="reflect")
    # (C, H, W, kh, kw) windows -> columns (C*kh*kw, H*W)
    win = sliding_window_view(xp, (kh, kw), axis=(1, 2))
    cols = win.transpose(0, 3, 4, 1, 2).reshape(c * kh * kw, h * w)
    cols = np.ascontiguousarray(cols, dtype=np.float32)
    flat = kernel.reshape(out_ch, c * kh * kw) @ cols
    out = flat.reshape(out_ch, h, w) + bias[:, None, None]
    return FeatureMap(out)


def relu(x: FeatureMap) -> FeatureMap:
    return FeatureMap(np.maximum(x.data, 0.0))


def maxpool2(x: FeatureMap) -> tuple[FeatureMap, np.ndarray]:
    """2x2 max pool, stride 2.  Also returns the per-window argmax offsets.

    Ties break to the first position in row-major scan order, which keeps
    unpooling deterministic.
    """
    c, h, w = x.data.shape
    if h % 2 or w % 2:
        raise ShapeError(f"maxpool2 needs even spatial dims, got {h}x{w}")
    win = x.data.reshape(c, h // 2, 2, w // 2, 2).transpose(0, 1, 3, 2, 4)
    flat = win.reshape(c, h // 2, w // 2, 4)
    idx = flat.argmax(axis=3).astype(np.uint8)  # argmax picks first max on ties
    pooled = np.take_along_axis(flat, idx[..., None].astype(np.intp), axis=3)[..., 0]
    return FeatureMap(pooled), idx


def upsample_nearest2(x: FeatureMap) -> FeatureMap:
    """Double both spatial dims; every output 2x2 block copies its source pixel."""
    return FeatureMap(np.repeat(np.repeat(x.data, 2, axis=1), 2, axis=2))


def unpool(x: FeatureMap, offsets: np.ndarray) -> FeatureMap:
    """Scatter each value to its recorded argmax position; rest stays zero."""
    offsets = np.asarray(offsets)
    if offsets.shape != x.data.shape:
        raise ShapeError(
            f"pool offsets shape {offsets.shape} does not match feature map "
            f"shape {x.data.shape}"
        )
    if offsets.size and (offsets.min() < 0 or offsets.max() > 3):
        raise ArgumentError("pool offsets must lie in 0..3")
    c, h, w = x.data.shape
    out = np.zeros((c, h, w, 4), dtype=np.float32)
    np.put_along_axis(out, offsets[..., None].astype(np.intp), x.data[..., None], axis=3)
    out = out.reshape(c, h, w, 2, 2).transpose(0, 1, 3, 2, 4).reshape(c, 2 * h, 2 * w)
    return FeatureMap(out)
