"""VGG-19 encoder slices, mirrored decoders and image pre/post-processing.

Encoder slices end at relu{level}_1 for level in 1..5 and are strict
prefixes of each other.  Decoders mirror the slice in reverse, with an
upsampling step wherever the encoder pooled; the photorealistic variant
uses a second decoder family (``udecoder``) whose upsampling is argmax
unpooling.

Preprocessing matches the published VGG-19 convention: RGB in [0, 1] is
scaled to [0, 255], reordered to BGR and shifted by the dataset mean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ManifestError
from .layers import PoolIndices, conv2d, maxpool2, relu, unpool, upsample_nearest2
from .tensor import FeatureMap, Image

VGG_MEAN_BGR = np.array([103.939, 116.779, 123.68], dtype=np.float32)

# Encoder layer list through relu5_1: (name, in_ch, out_ch); "pool" between blocks.
ENCODER_LAYERS: tuple = (
    ("conv1_1", 3, 64),
    ("conv1_2", 64, 64),
    "pool",
    ("conv2_1", 64, 128),
    ("conv2_2", 128, 128),
    "pool",
    ("conv3_1", 128, 256),
    ("conv3_2", 256, 256),
    ("conv3_3", 256, 256),
    ("conv3_4", 256, 256),
    "pool",
    ("conv4_1", 256, 512),
    ("conv4_2", 512, 512),
    ("conv4_3", 512, 512),
    ("conv4_4", 512, 512),
    "pool",
    ("conv5_1", 512, 512),
)


def encoder_slice(level: int) -> tuple:
    """Layers of the slice ending at relu{level}_1 (prefix property by construction)."""
    if level not in (1, 2, 3, 4, 5):
        raise ArgumentError(f"encoder level must be in 1..5, got {level}")
    target = f"conv{level}_1"
    out = []
    for entry in ENCODER_LAYERS:
        out.append(entry)
        if entry != "pool" and entry[0] == target:
            return tuple(out)
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class DecoderConv:
    name: str
    in_ch: int
    out_ch: int
    upsample_before: bool


def decoder_spec(level: int, family: str = "decoder") -> tuple[DecoderConv, ...]:
    """Mirror of the level's encoder slice; conv channel counts transposed.

    ``family`` selects the tensor name prefix: "decoder" (nearest
    upsampling) or "udecoder" (argmax unpooling).
    """
    if family not in ("decoder", "udecoder"):
        raise ArgumentError(f"unknown decoder family {family!r}")
    convs = []
    pending_up = False
    k = 0
    for entry in reversed(encoder_slice(level)):
        if entry == "pool":
            pending_up = True
            continue
        name, in_ch, out_ch = entry
        k += 1
        convs.append(
            DecoderConv(f"{family}{level}.conv{k}", out_ch, in_ch, pending_up)
        )
        pending_up = False
    return tuple(convs)


def _get_conv(weights, name: str, in_ch: int, out_ch: int) -> tuple[np.ndarray, np.ndarray]:
    try:
        w = weights[f"{name}.weight"]
        b = weights[f"{name}.bias"]
    except ManifestError as e:
        raise ManifestError(str(e)) from None
    if w.shape != (out_ch, in_ch, 3, 3):
        raise ManifestError(
            f"{name}.weight has shape {w.shape}, expected {(out_ch, in_ch, 3, 3)}"
        )
    if b.shape != (out_ch,):
        raise ManifestError(f"{name}.bias has shape {b.shape}, expected ({out_ch},)")
    return w, b


def preprocess(img: Image) -> FeatureMap:
    """RGB [0,1] image -> network input plane (BGR, [0,255] minus VGG mean)."""
    x = img.data.astype(np.float32) * 255.0
    x = x[:, :, ::-1]  # RGB -> BGR
    x = x - VGG_MEAN_BGR
    return FeatureMap(x.transpose(2, 0, 1))


def postprocess(f: FeatureMap) -> Image:
    """Inverse of :func:`preprocess`, clamped to [0,1]."""
    if f.channels != 3:
        raise ArgumentError(f"postprocess expects 3 channels, got {f.channels}")
    x = f.data.transpose(1, 2, 0) + VGG_MEAN_BGR
    x = x[:, :, ::-1] / 255.0
    return Image(np.clip(x, 0.0, 1.0))


def encode(img: Image, level: int, weights) -> tuple[FeatureMap, PoolIndices]:
    """Run the encoder slice for ``level``; returns relu{level}_1 activations
    plus the argmax offsets of every pooling layer passed on the way."""
    x = preprocess(img)
    return encode_features(x, level, weights)


def encode_features(x: FeatureMap, level: int, weights) -> tuple[FeatureMap, PoolIndices]:
    """Encoder slice applied to an already-preprocessed input plane."""
    offsets = []
    for entry in encoder_slice(level):
        if entry == "pool":
            x, idx = maxpool2(x)
            offsets.append(idx)
            continue
        name, in_ch, out_ch = entry
        w, b = _get_conv(weights, name, in_ch, out_ch)
        x = relu(conv2d(x, w, b))
    return x, PoolIndices(tuple(offsets))


def decode(
    f: FeatureMap,
    level: int,
    weights,
    mode: str = "upsample",
    indices: PoolIndices | None = None,
) -> Image:
    """Mirror decoder for ``level``: features at relu{level}_1 -> image.

    ``mode`` is "upsample" (nearest) or "unpool"; unpooling consumes the
    encoder's recorded indices in reverse order.
    """
    if mode not in ("upsample", "unpool"):
        raise ArgumentError(f"unknown decode mode {mode!r}")
    family = "decoder" if mode == "upsample" else "udecoder"
    spec = decoder_spec(level, family)
    n_up = sum(c.upsample_before for c in spec)
    if mode == "unpool":
        if indices is None:
            raise ArgumentError("unpool mode requires the encoder's pool indices")
        if len(indices) != n_up:
            raise ArgumentError(
                f"decoder level {level} needs {n_up} pool index sets, got {len(indices)}"
            )
    x = f
    up_done = 0
    for i, cv in enumerate(spec):
        if cv.upsample_before:
            if mode == "upsample":
                x = upsample_nearest2(x)
            else:
                # encoder recorded pools outermost-first; decoder walks back
                x = unpool(x, indices.offsets[n_up - 1 - up_done])
            up_done += 1
        w, b = _get_conv(weights, cv.name, cv.in_ch, cv.out_ch)
        x = conv2d(x, w, b)
        if i + 1 < len(spec):
            x = relu(x)
    return postprocess(x)
