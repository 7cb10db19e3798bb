"""End-to-end stylization: encode -> feature transform -> decode, with the
single-pass, cascaded multi-level and photorealistic variants.

The cascade follows the multi-level recipe: the image decoded from the
highest remaining level becomes the content input of the next one, while
the style image is re-encoded from the original at every level.  Images
are clamped to [0, 1] between levels so drift cannot accumulate across
the repeated decode/encode round trips.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.ndimage import uniform_filter

from .errors import ArgumentError
from .imageio import resize_image
from .tensor import FeatureMatrix, Image, from_matrix, to_matrix
from .transforms import wct, wct_blend
from .vgg import decode, encode

GUIDED_RADIUS = 7
GUIDED_EPS = 1e-4

# luma weights, ITU-R BT.601
_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)


class Method(enum.Enum):
    ADAIN = "adain"
    UST_ADAIN = "ust-adain"
    UST_WCT = "ust-wct"
    UST_WCT4 = "ust-wct4"
    PHOTO_R = "photo-r"

    @classmethod
    def from_name(cls, name: str) -> "Method":
        for m in cls:
            if m.value == name:
                return m
        raise ArgumentError(f"unknown method {name!r}")


DEFAULT_ALPHA = {
    Method.ADAIN: 1.0,
    Method.UST_ADAIN: 1.0,
    Method.UST_WCT: 0.6,
    Method.UST_WCT4: 0.6,
    Method.PHOTO_R: 0.6,
}

LEVEL_SCHEDULE = {
    Method.ADAIN: (4,),
    Method.UST_ADAIN: (5, 4, 3, 2, 1),
    Method.UST_WCT: (5, 4, 3, 2, 1),
    Method.UST_WCT4: (4, 3, 2, 1),
    Method.PHOTO_R: (4, 3, 2, 1),
}

DEFAULT_OUTPUT_SIZE = (600, 450)  # (width, height)


@dataclass(frozen=True)
class MethodConfig:
    """Serializable run configuration for one stylization method."""

    method: Method
    alpha: float | None = None
    output_size: tuple[int, int] = DEFAULT_OUTPUT_SIZE
    levels: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.alpha is None:
            object.__setattr__(self, "alpha", DEFAULT_ALPHA[self.method])
        if not 0.0 <= self.alpha <= 1.0:
            raise ArgumentError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.levels is None:
            object.__setattr__(self, "levels", LEVEL_SCHEDULE[self.method])
        if len(self.levels) == 0:
            raise ArgumentError("level schedule must not be empty")
        w, h = self.output_size
        if w < 16 or h < 16:
            raise ArgumentError(f"output size too small: {self.output_size}")


@dataclass
class RunStats:
    """Instrumentation counters; purely observational."""

    encode_calls: list[int] = field(default_factory=list)  # level per encode
    decode_calls: list[int] = field(default_factory=list)  # level per decode
    stylize_calls: int = 0

    def levels_touched(self) -> set[int]:
        return set(self.encode_calls)


def working_size(output_size: tuple[int, int]) -> tuple[int, int]:
    """Nearest multiples of 16 so every pooling layer sees even dims."""
    w, h = output_size
    return max(16, round(w / 16) * 16), max(16, round(h / 16) * 16)


def _adain_rows(content_mat: FeatureMatrix, style_mat: FeatureMatrix) -> FeatureMatrix:
    """Row-wise mean/variance matching; same math as :func:`nstlab.transforms.adain`
    but on the vectorized view, skipping the map/matrix round trips."""
    from .transforms import ADAIN_EPS

    c = content_mat.data
    s = style_mat.data.astype(np.float64)
    mu_c = c.mean(axis=1, dtype=np.float64)
    var_c = c.var(axis=1, dtype=np.float64)
    mu_s = s.mean(axis=1)
    var_s = s.var(axis=1)
    scale = np.sqrt(var_s) / np.sqrt(var_c + ADAIN_EPS)
    out = scale[:, None] * (c.astype(np.float64) - mu_c[:, None]) + mu_s[:, None]
    return FeatureMatrix(out.astype(np.float32))


def _transform_level(
    content_mat: FeatureMatrix,
    style_mat: FeatureMatrix,
    transform: str,
    alpha: float,
    debug_hook: Callable | None,
    level: int,
) -> FeatureMatrix:
    if transform == "wct":
        inter = wct(content_mat, style_mat)
        transformed = inter.colored
    elif transform == "adain":
        transformed = _adain_rows(content_mat, style_mat)
    else:
        raise ArgumentError(f"unknown transform {transform!r}")
    if debug_hook is not None:
        debug_hook(level, content_mat, style_mat, transformed)
    return wct_blend(content_mat, transformed, alpha)


def stylize_multilevel(
    content: Image,
    style: Image,
    levels,
    transform: str,
    alpha: float,
    weights,
    mode: str = "upsample",
    stats: RunStats | None = None,
    debug_hook: Callable | None = None,
) -> Image:
    """Cascade single-level stylizations from the highest level downward."""
    levels = tuple(levels)
    if not levels:
        raise ArgumentError("level schedule must not be empty")
    cur = content
    for level in levels:
        f_c, idx = encode(cur, level, weights)
        f_s, _ = encode(style, level, weights)
        if stats is not None:
            stats.encode_calls += [level, level]
        blended = _transform_level(
            to_matrix(f_c),
            to_matrix(f_s),
            transform,
            alpha,
            debug_hook,
            level,
        )
        fmap = from_matrix(blended, f_c.height, f_c.width)
        cur = decode(fmap, level, weights, mode=mode, indices=idx)
        if stats is not None:
            stats.decode_calls.append(level)
    return cur


def smooth(stylized: Image, guide: Image) -> Image:
    """Edge-aware local smoothing of ``stylized`` steered by ``guide``.

    Guided filter on the guide's luma (radius 7, eps 1e-4), applied to
    each channel.  Pixels with similar guide content end up stylized
    similarly; guide edges survive because the local affine fit tracks
    them.
    """
    if stylized.data.shape != guide.data.shape:
        raise ArgumentError("stylized and guide images must share dimensions")
    size = 2 * GUIDED_RADIUS + 1
    g = guide.data.astype(np.float64) @ _LUMA

    def box(a):
        return uniform_filter(a, size=size, mode="nearest")

    mean_g = box(g)
    var_g = box(g * g) - mean_g * mean_g
    out = np.empty_like(stylized.data, dtype=np.float64)
    for ch in range(3):
        p = stylized.data[:, :, ch].astype(np.float64)
        mean_p = box(p)
        cov_gp = box(g * p) - mean_g * mean_p
        a = cov_gp / (var_g + GUIDED_EPS)
        b = mean_p - a * mean_g
        out[:, :, ch] = box(a) * g + box(b)
    return Image(np.clip(out, 0.0, 1.0))


def photo_r(
    content: Image,
    style: Image,
    alpha: float,
    weights,
    stats: RunStats | None = None,
    debug_hook: Callable | None = None,
) -> Image:
    """Photorealistic variant: 4-level WCT cascade with unpooling decoders,
    then guide-driven smoothing against the content image."""
    rough = stylize_multilevel(
        content,
        style,
        LEVEL_SCHEDULE[Method.PHOTO_R],
        "wct",
        alpha,
        weights,
        mode="unpool",
        stats=stats,
        debug_hook=debug_hook,
    )
    return smooth(rough, content)


def stylize(
    content: Image,
    style: Image,
    cfg: MethodConfig,
    weights,
    stats: RunStats | None = None,
    debug_hook: Callable | None = None,
) -> Image:
    """Stylize ``content`` with ``style`` per the method configuration.

    Both images are resized (bilinear) to the multiple-of-16 working size
    derived from ``cfg.output_size``; the result is resized back to the
    exact requested size.
    """
    if stats is not None:
        stats.stylize_calls += 1
    ww, wh = working_size(cfg.output_size)
    c = resize_image(content, ww, wh)
    s = resize_image(style, ww, wh)
    if cfg.method is Method.PHOTO_R:
        out = stylize_multilevel(
            c, s, cfg.levels, "wct", cfg.alpha, weights,
            mode="unpool", stats=stats, debug_hook=debug_hook,
        )
        out = smooth(out, c)
    else:
        transform = "adain" if cfg.method in (Method.ADAIN, Method.UST_ADAIN) else "wct"
        out = stylize_multilevel(
            c, s, cfg.levels, transform, cfg.alpha, weights,
            stats=stats, debug_hook=debug_hook,
        )
    return resize_image(out, *cfg.output_size)
