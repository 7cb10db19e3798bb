import numpy as np
import pytest

from nstlab.errors import ArgumentError, ManifestError
from nstlab.evaluation import ssim
from nstlab.tensor import FeatureMap, Image
from nstlab.vgg import (
    ENCODER_LAYERS,
    decode,
    decoder_spec,
    encode,
    encoder_slice,
    postprocess,
    preprocess,
)
from nstlab.weights import WeightStore

from .conftest import block16_image

rng = np.random.default_rng(11)


def test_encoder_slices_are_prefixes():
    for level in range(1, 5):
        shorter = encoder_slice(level)
        longer = encoder_slice(level + 1)
        assert longer[: len(shorter)] == shorter


def test_encoder_slice_pool_counts():
    for level in range(1, 6):
        pools = sum(1 for e in encoder_slice(level) if e == "pool")
        assert pools == level - 1


def test_decoder_spec_mirrors_channels():
    spec = decoder_spec(4)
    assert spec[0].in_ch == 512 and spec[-1].out_ch == 3
    assert sum(c.upsample_before for c in spec) == 3
    # consecutive convs chain their channel counts
    for a, b in zip(spec, spec[1:]):
        assert a.out_ch == b.in_ch


def test_preprocess_postprocess_roundtrip():
    img = Image(rng.random((8, 10, 3)).astype(np.float32))
    back = postprocess(preprocess(img))
    assert np.abs(back.data - img.data).max() < 1e-5


def test_encode_level1_shape(store):
    img = Image(rng.random((32, 48, 3)).astype(np.float32))
    f, idx = encode(img, 1, store)
    assert f.data.shape == (64, 32, 48)
    assert len(idx) == 0


def test_encode_level4_halves_three_times(store):
    img = Image(rng.random((64, 64, 3)).astype(np.float32))
    f, idx = encode(img, 4, store)
    assert f.data.shape == (512, 8, 8)
    assert len(idx) == 3


def test_encode_level5_shape(store):
    img = Image(rng.random((64, 96, 3)).astype(np.float32))
    f, idx = encode(img, 5, store)
    assert f.data.shape == (512, 4, 6)
    assert len(idx) == 4


def test_encode_deterministic(store):
    img = Image(rng.random((32, 32, 3)).astype(np.float32))
    a, _ = encode(img, 3, store)
    b, _ = encode(img, 3, store)
    assert np.array_equal(a.data, b.data)


def test_decode_deterministic(store):
    img = block16_image(3)
    f, idx = encode(img, 2, store)
    a = decode(f, 2, store)
    b = decode(f, 2, store)
    assert np.array_equal(a.data, b.data)


@pytest.mark.parametrize("level", [1, 2, 3, 4, 5])
def test_reconstruction_ssim(store, level):
    img = block16_image(9)
    f, idx = encode(img, level, store)
    out = decode(f, level, store)
    assert ssim(out, img) >= 0.8


def test_unpool_reconstruction(store):
    img = block16_image(5)
    for level in (1, 2, 3, 4):
        f, idx = encode(img, level, store)
        out = decode(f, level, store, mode="unpool", indices=idx)
        assert ssim(out, img) >= 0.8


def test_zero_feature_map_decodes_in_range(store):
    z = FeatureMap(np.zeros((64, 8, 8), dtype=np.float32))
    out = decode(z, 1, store)
    assert out.data.min() >= 0.0 and out.data.max() <= 1.0


def test_unpool_without_indices_rejected(store):
    f = FeatureMap(np.zeros((128, 4, 4), dtype=np.float32))
    with pytest.raises(ArgumentError):
        decode(f, 2, store, mode="unpool")


def test_missing_weights_manifest_error():
    empty = WeightStore({})
    img = Image(rng.random((16, 16, 3)).astype(np.float32))
    with pytest.raises(ManifestError):
        encode(img, 1, empty)


def test_misshaped_weight_manifest_error():
    bad = WeightStore(
        {
            "conv1_1.weight": np.zeros((64, 3, 1, 1), dtype=np.float32),
            "conv1_1.bias": np.zeros(64, dtype=np.float32),
        }
    )
    img = Image(rng.random((16, 16, 3)).astype(np.float32))
    with pytest.raises(ManifestError):
        encode(img, 1, bad)


def test_encode_never_emits_nan(store):
    img = Image(rng.random((32, 32, 3)).astype(np.float32))
    f, _ = encode(img, 5, store)
    assert np.isfinite(f.data).all()


def test_bad_level_rejected():
    with pytest.raises(ArgumentError):
        encoder_slice(0)
    with pytest.raises(ArgumentError):
        encoder_slice(6)
