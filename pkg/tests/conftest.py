import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from nstlab.synthetic import synthetic_tensors
from nstlab.tensor import Image
from nstlab.weights import WeightStore, save_weights


@pytest.fixture(scope="session")
def store() -> WeightStore:
    return WeightStore(synthetic_tensors())


@pytest.fixture(scope="session")
def weights_file(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("weights") / "synthetic.nstw"
    save_weights(path, synthetic_tensors())
    return str(path)


def multiscale_image(seed: int, height: int = 64, width: int = 96) -> Image:
    """Smooth multi-octave noise; structure at several scales, none of it
    aligned with the pooling grid."""
    rng = np.random.default_rng(seed)
    d = np.zeros((height, width, 3))
    for sigma, amp in ((2, 0.3), (6, 0.5), (12, 0.7)):
        d += amp * gaussian_filter(rng.standard_normal((height, width, 3)), (sigma, sigma, 0))
    d = (d - d.min()) / (d.max() - d.min())
    return Image(d.astype(np.float32))


def block16_image(seed: int, height: int = 64, width: int = 96) -> Image:
    """Constant on pooling-aligned 16x16 blocks, so every max-pool window is
    constant and pool/upsample round trips are exact."""
    rng = np.random.default_rng(seed)
    small = rng.random((height // 16, width // 16, 3))
    d = np.repeat(np.repeat(small, 16, axis=0), 16, axis=1)
    return Image(d.astype(np.float32))


@pytest.fixture(scope="session")
def desk_corpus() -> list[tuple[Image, Image]]:
    """Five content/style pairs used by the directional checks."""
    return [(multiscale_image(2 * i), multiscale_image(1001 + 2 * i)) for i in range(5)]
