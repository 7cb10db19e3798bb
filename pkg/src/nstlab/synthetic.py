"""Hand-authored weight sets for testing without pretrained checkpoints.

The generated network is shape-identical to the real VGG-19 encoder /
mirror-decoder family, but its kernels are pass-through deltas that carry
the three image planes in channels 0..2 with a positive bias so ReLU never
clips them.  decode(encode(img)) is then exact up to pooling loss, which
makes reconstruction and alpha=0 contracts checkable with no downloads.

The unpooling decoders replace the delta after each unpool with a 2x2
"quadrant" kernel that gathers the scattered value back into every cell
of its pooling window, so argmax-scattered maps are reassembled instead
of staying sparse.
"""

from __future__ import annotations

import numpy as np

from .vgg import ENCODER_LAYERS, decoder_spec

PASS_BIAS = 160.0  # keeps VGG-mean-subtracted planes (>= -124) positive
N_PLANES = 3


def _delta(in_ch: int, out_ch: int, scale: float = 1.0) -> np.ndarray:
    w = np.zeros((out_ch, in_ch, 3, 3), dtype=np.float32)
    for c in range(min(N_PLANES, in_ch, out_ch)):
        w[c, c, 1, 1] = scale
    return w


def _quadrant(in_ch: int, out_ch: int) -> np.ndarray:
    # taps at offsets {-1,0}^2: sums the unique non-zero of each 2x2 pool
    # window back onto all four of its cells
    w = np.zeros((out_ch, in_ch, 3, 3), dtype=np.float32)
    for c in range(min(N_PLANES, in_ch, out_ch)):
        w[c, c, 0:2, 0:2] = 1.0
    return w


def synthetic_tensors() -> dict[str, np.ndarray]:
    """Full pass-through weight set: encoder, decoders 1..5, udecoders 1..4."""
    t: dict[str, np.ndarray] = {}
    for entry in ENCODER_LAYERS:
        if entry == "pool":
            continue
        name, in_ch, out_ch = entry
        t[f"{name}.weight"] = _delta(in_ch, out_ch)
        bias = np.zeros(out_ch, dtype=np.float32)
        if name == "conv1_1":
            bias[:N_PLANES] = PASS_BIAS
        t[f"{name}.bias"] = bias

    for family, levels in (("decoder", (1, 2, 3, 4, 5)), ("udecoder", (1, 2, 3, 4))):
        for level in levels:
            spec = decoder_spec(level, family)
            for i, cv in enumerate(spec):
                if family == "udecoder" and cv.upsample_before:
                    w = _quadrant(cv.in_ch, cv.out_ch)
                else:
                    w = _delta(cv.in_ch, cv.out_ch)
                b = np.zeros(cv.out_ch, dtype=np.float32)
                if i == len(spec) - 1:
                    b[:N_PLANES] = -PASS_BIAS
                t[f"{cv.name}.weight"] = w
                t[f"{cv.name}.bias"] = b
    return t
