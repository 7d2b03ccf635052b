import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from texpyr.bitdesc import BitFeatures
from texpyr.cooccur import GlcmFeatures, HaralickFeatures
from texpyr.errors import ExtractionError, ImageTooSmall
from texpyr.infotheory import INFO_NAMES
from texpyr.pipeline import (
    FAMILIES,
    ExtractionConfig,
    block_channels,
    extract_block,
    extract_family,
    extract_tio,
    feature_schema,
    pyramid_level_images,
)


def _noise(seed, shape=(40, 40, 3)):
    return np.random.default_rng(seed).integers(0, 256, shape, dtype=np.uint8)


def _cols(family, name):
    schema = feature_schema()
    return [k for k, e in enumerate(schema.entries) if e.family == family and e.name == name]


def test_schema_accounting():
    schema = feature_schema()
    assert schema.total_dims == 315
    assert schema.counts() == {"bit": 126, "haralick": 117, "glcm": 54, "info": 18}
    assert len(set(schema.columns)) == 315
    assert schema.columns[0] == "bit_L0_R_margalef"
    assert schema.columns[-1] == "info_L2_RGB_MI_GB"
    assert schema.family_slice("glcm") == slice(243, 297)
    assert schema.manifest().startswith("# schema tio-1 dims=315\n")
    assert feature_schema().fingerprint() == schema.fingerprint()


def test_schema_field_names_follow_descriptors():
    schema = feature_schema()
    bit = [e.name for e in schema.entries if e.family == "bit" and e.level == 0 and e.channel == "R"]
    assert bit == BitFeatures.names()
    har = [e.name for e in schema.entries if e.family == "haralick" and e.level == 1 and e.channel == "G"]
    assert har == HaralickFeatures.names()
    glcm = [e.name for e in schema.entries if e.family == "glcm" and e.level == 2 and e.channel == "B"]
    assert glcm == GlcmFeatures.names()
    assert tuple(e.name for e in schema.entries if e.family == "info" and e.level == 0) == INFO_NAMES


def test_vector_shape_and_finiteness():
    fv = extract_tio(_noise(0), source_id="x.png")
    assert fv.values.shape == (315,)
    assert np.all(np.isfinite(fv.values))
    assert fv.schema_version == "tio-1" and fv.source_id == "x.png"


def test_constant_image_degenerate_vector():
    v = extract_tio(np.full((32, 32, 3), (10, 120, 250), np.uint8)).values
    assert np.all(v[_cols("glcm", "contrast")] == 0)
    assert np.all(v[_cols("haralick", "entropy")] == 0)
    assert np.all(v[[k for k in range(297, 315) if k % 6 < 3]] == 0)
    assert np.all(v[_cols("bit", "shannon_wiener")] == 0)
    assert np.array_equal(v, extract_tio(np.full((32, 32, 3), (10, 120, 250), np.uint8)).values)


def test_determinism():
    img = _noise(3)
    assert extract_tio(img).values.tobytes() == extract_tio(img.copy()).values.tobytes()


def test_grayscale_input_gives_equal_channels():
    gray = np.random.default_rng(1).integers(0, 256, (24, 24), dtype=np.uint8)
    v = extract_tio(np.stack([gray] * 3, axis=2)).values
    schema = feature_schema()
    r = [k for k, e in enumerate(schema.entries) if e.family == "bit" and e.channel == "R"]
    g = [k for k, e in enumerate(schema.entries) if e.family == "bit" and e.channel == "G"]
    assert np.array_equal(v[r], v[g])


@pytest.mark.parametrize("family,size", [("bit", 126), ("haralick", 117), ("glcm", 54), ("info", 18)])
def test_family_sizes(family, size):
    assert extract_family(_noise(4, (16, 16, 3)), family).shape == (size,)


def test_block_on_constant_image():
    b = extract_block(np.full((16, 16, 3), 7, np.uint8), "bit", 0, "R")
    expected = np.zeros(14)
    expected[BitFeatures.names().index("berger_parker")] = 1.0
    expected[BitFeatures.names().index("menhinick")] = 1 / 16
    assert b.tolist() == expected.tolist()


def test_block_argument_errors():
    img = _noise(5, (16, 16, 3))
    with pytest.raises(ValueError):
        extract_block(img, "lbp", 0, "R")
    with pytest.raises(ValueError):
        extract_block(img, "info", 0, "R")
    with pytest.raises(ValueError):
        extract_block(img, "bit", 3, "R")


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(8, 30), st.integers(8, 30))
def test_schema_completeness(seed, h, w):
    img = _noise(seed, (h, w, 3))
    parts = [
        extract_block(img, family, level, ch)
        for family in FAMILIES
        for level in range(3)
        for ch in block_channels(family)
    ]
    assert np.array_equal(np.concatenate(parts), extract_tio(img).values)
    families = np.concatenate([extract_family(img, f) for f in FAMILIES])
    assert np.array_equal(families, extract_tio(img).values)


def test_level_monotonicity_on_noise():
    l0, l2 = _cols("glcm", "contrast")[0:3], _cols("glcm", "contrast")[6:9]
    hits = 0
    n = 30
    for seed in range(n):
        v = extract_tio(_noise(100 + seed, (48, 48, 3))).values
        hits += int(np.all(v[l2] <= v[l0]))
    assert hits / n >= 0.95


@pytest.mark.parametrize("seed", range(5))
def test_rotation_invariance_odd_sizes(seed):
    # 33 -> 17 -> 9: odd sizes keep the subsampling grid centred under rotation
    img = _noise(seed, (33, 33, 3))
    a = extract_tio(img).values
    b = extract_tio(np.ascontiguousarray(img[::-1, ::-1])).values
    schema = feature_schema()
    keep = [k for k, e in enumerate(schema.entries) if e.family in ("glcm", "bit")]
    assert np.allclose(a[keep], b[keep], rtol=1e-12, atol=1e-12)


def test_rotation_invariance_level0_even_size():
    img = _noise(9, (20, 26, 3))
    rot = np.ascontiguousarray(img[::-1, ::-1])
    for family in ("glcm", "bit"):
        for ch in "RGB":
            assert np.allclose(extract_block(img, family, 0, ch), extract_block(rot, family, 0, ch), atol=1e-12)


def test_too_small():
    with pytest.raises(ImageTooSmall):
        extract_block(np.zeros((7, 9, 3), np.uint8), "bit", 0, "R")
    with pytest.raises(ExtractionError) as info:
        extract_tio(np.zeros((7, 9, 3), np.uint8), source_id="tiny.png")
    assert info.value.source_id == "tiny.png"


def test_config_levels():
    cfg = ExtractionConfig(pyramid_levels=2)
    assert extract_tio(_noise(6, (16, 16, 3)), cfg).values.shape == (feature_schema(2).total_dims,)
    assert feature_schema(2).total_dims == 210


def test_pyramid_level_images():
    levels = pyramid_level_images(_noise(7, (200, 200, 3)))
    assert [im.shape for im in levels] == [(200, 200, 3), (100, 100, 3), (50, 50, 3)]
    assert all(im.dtype == np.uint8 for im in levels)
