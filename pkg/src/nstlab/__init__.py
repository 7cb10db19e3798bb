"""Inference-only neural style transfer engine and evaluation harness.

Five methods (adain, ust-adain, ust-wct, ust-wct4, photo-r) over a shared
VGG-19 encoder / mirror-decoder stack, plus SSIM and runtime reporting.
"""

from .pipeline import Method, MethodConfig, stylize  # noqa: F401
from .tensor import FeatureMap, FeatureMatrix, Image  # noqa: F401
from .weights import WeightStore, load_weights, save_weights  # noqa: F401

__version__ = "0.1.0"
