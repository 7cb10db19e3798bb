"""SSIM, corpus-level quality reports and the runtime benchmark harness.

SSIM runs on BT.601 luma with an 11x11 Gaussian window (sigma 1.5) over
valid window positions only.  Reports carry both SSIM means and the
Gram/activation loss diagnostics, since SSIM alone says little about
style similarity; CSV is the machine contract, the aligned text render
is for humans.
"""

from __future__ import annotations

import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.ndimage import correlate1d

from .errors import ArgumentError, ShapeError
from .pipeline import Method, MethodConfig, RunStats, stylize, working_size
from .tensor import Image, to_matrix
from .transforms import StyleLossWeights, content_loss, gram, style_loss
from .imageio import resize_image
from .vgg import encode

_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)

CONTENT_LAYER = 4          # relu4_1, configurable at call sites
STYLE_LAYERS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class SsimParams:
    window: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0:
            raise ArgumentError("K1 and K2 must be positive")
        if self.window < 1 or self.window % 2 == 0:
            raise ArgumentError("window must be a positive odd size")

    def weights(self) -> np.ndarray:
        half = self.window // 2
        x = np.arange(-half, half + 1, dtype=np.float64)
        w = np.exp(-(x * x) / (2.0 * self.sigma * self.sigma))
        return w / w.sum()


def _luma(img: Image) -> np.ndarray:
    return img.data.astype(np.float64) @ _LUMA


def ssim(a: Image, b: Image, params: SsimParams = SsimParams()) -> float:
    """Mean local SSIM over all fully-valid window positions."""
    if a.data.shape != b.data.shape:
        raise ShapeError(f"ssim shape mismatch: {a.data.shape} vs {b.data.shape}")
    if a.height < params.window or a.width < params.window:
        raise ArgumentError(
            f"image {a.width}x{a.height} smaller than the {params.window}-pixel window"
        )
    x, y = _luma(a), _luma(b)
    w = params.weights()
    half = params.window // 2

    def filt(img):
        out = correlate1d(img, w, axis=0, mode="constant")
        out = correlate1d(out, w, axis=1, mode="constant")
        return out[half:-half, half:-half]

    mu_x, mu_y = filt(x), filt(y)
    sxx = filt(x * x) - mu_x * mu_x
    syy = filt(y * y) - mu_y * mu_y
    sxy = filt(x * y) - mu_x * mu_y
    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2
    num = (2 * mu_x * mu_y + c1) * (2 * sxy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


@dataclass(frozen=True)
class MethodRow:
    method: Method
    style_ssim_mean: float
    content_ssim_mean: float
    style_loss_mean: float
    content_loss_mean: float
    n_pairs: int


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[MethodRow, ...]
    corpus: str
    timestamp: float

    CSV_HEADER = (
        "method,style_ssim_mean,content_ssim_mean,style_loss_mean,"
        "content_loss_mean,n_pairs"
    )

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.CSV_HEADER + "\n")
        for r in self.rows:
            buf.write(
                f"{r.method.value},{r.style_ssim_mean:.6f},{r.content_ssim_mean:.6f},"
                f"{r.style_loss_mean:.6g},{r.content_loss_mean:.6g},{r.n_pairs}\n"
            )
        return buf.getvalue()

    def render_text(self) -> str:
        lines = [f"corpus: {self.corpus}"]
        lines.append(
            f"{'method':<10} {'ssim_style':>11} {'ssim_content':>13} "
            f"{'style_loss':>12} {'content_loss':>13}"
        )
        for r in self.rows:
            lines.append(
                f"{r.method.value:<10} {r.style_ssim_mean:>11.4f} "
                f"{r.content_ssim_mean:>13.4f} {r.style_loss_mean:>12.4g} "
                f"{r.content_loss_mean:>13.4g}"
            )
        return "\n".join(lines) + "\n"


def _pair_metrics(content, style, cfg, weights, params):
    out = stylize(content, style, cfg, weights)
    ww, wh = working_size(cfg.output_size)
    out_w = resize_image(out, ww, wh)
    content_w = resize_image(content, ww, wh)
    style_w = resize_image(style, ww, wh)

    s_ssim = ssim(out, resize_image(style, *cfg.output_size), params)
    c_ssim = ssim(out, resize_image(content, *cfg.output_size), params)

    f_out, _ = encode(out_w, CONTENT_LAYER, weights)
    f_con, _ = encode(content_w, CONTENT_LAYER, weights)
    c_loss = content_loss(f_out, f_con)

    layer_pairs = []
    for lvl in STYLE_LAYERS:
        fo, _ = encode(out_w, lvl, weights)
        fs, _ = encode(style_w, lvl, weights)
        mo, ms = to_matrix(fo), to_matrix(fs)
        layer_pairs.append((gram(mo), gram(ms), mo.rows, mo.cols))
    s_loss = style_loss(layer_pairs, StyleLossWeights.uniform(len(STYLE_LAYERS)))
    return s_ssim, c_ssim, s_loss, c_loss


def evaluate_corpus(
    methods: Sequence[Method],
    pairs: Sequence[tuple[Image, Image]],
    weights,
    output_size: tuple[int, int] = (600, 450),
    params: SsimParams = SsimParams(),
    jobs: int = 1,
    corpus: str = "",
) -> EvalReport:
    """Stylize every (content, style) pair with every method and average
    the SSIM / loss metrics per method."""
    if not pairs:
        raise ArgumentError("corpus is empty")
    if not methods:
        raise ArgumentError("no methods selected")
    rows = []
    for method in methods:
        cfg = MethodConfig(method=method, output_size=output_size)
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                metrics = list(
                    pool.map(
                        lambda cs: _pair_metrics(cs[0], cs[1], cfg, weights, params),
                        pairs,
                    )
                )
        else:
            metrics = [_pair_metrics(c, s, cfg, weights, params) for c, s in pairs]
        arr = np.asarray(metrics, dtype=np.float64)
        rows.append(
            MethodRow(
                method=method,
                style_ssim_mean=float(arr[:, 0].mean()),
                content_ssim_mean=float(arr[:, 1].mean()),
                style_loss_mean=float(arr[:, 2].mean()),
                content_loss_mean=float(arr[:, 3].mean()),
                n_pairs=len(pairs),
            )
        )
    return EvalReport(rows=tuple(rows), corpus=corpus, timestamp=time.time())


@dataclass(frozen=True)
class BenchReport:
    method: Method
    mean_s: float
    median_s: float
    std_s: float
    reps: int
    width: int
    height: int
    timed_calls: int  # instrumentation: stylize calls inside the timed loop

    CSV_HEADER = "method,mean_s,median_s,std_s,reps,width,height"

    def csv_row(self) -> str:
        return (
            f"{self.method.value},{self.mean_s:.6f},{self.median_s:.6f},"
            f"{self.std_s:.6f},{self.reps},{self.width},{self.height}"
        )


def bench_csv(reports: Sequence[BenchReport]) -> str:
    return BenchReport.CSV_HEADER + "\n" + "".join(r.csv_row() + "\n" for r in reports)


def benchmark(
    method: Method,
    cfg: MethodConfig,
    pairs: Sequence[tuple[Image, Image]],
    reps: int,
    weights=None,
) -> BenchReport:
    """Wall-clock stylization times over ``reps`` runs, cycling through the
    supplied pairs; one warm-up run is discarded and the timed loop holds
    nothing but the stylize calls.  Strictly single-threaded."""
    if reps < 1:
        raise ArgumentError("reps must be >= 1")
    if not pairs:
        raise ArgumentError("benchmark needs at least one image pair")
    if weights is None:
        raise ArgumentError("benchmark needs a weight store")
    if cfg.method is not method:
        cfg = MethodConfig(method=method, output_size=cfg.output_size)
    ww, wh = working_size(cfg.output_size)
    prepared = [
        (resize_image(c, ww, wh), resize_image(s, ww, wh)) for c, s in pairs
    ]
    stats = RunStats()
    stylize(prepared[0][0], prepared[0][1], cfg, weights, stats=stats)  # warm-up
    stats = RunStats()
    times = np.empty(reps, dtype=np.float64)
    for i in range(reps):
        c, s = prepared[i % len(prepared)]
        t0 = time.perf_counter()
        stylize(c, s, cfg, weights, stats=stats)
        times[i] = time.perf_counter() - t0
    w, h = cfg.output_size
    return BenchReport(
        method=method,
        mean_s=float(times.mean()),
        median_s=float(np.median(times)),
        std_s=float(times.std()),
        reps=reps,
        width=w,
        height=h,
        timed_calls=stats.stylize_calls,
    )
