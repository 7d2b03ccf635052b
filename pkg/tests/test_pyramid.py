from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_expand, naive_reduce
from texpyr.errors import ImageTooSmall, InvalidTargetSize
from texpyr.pyramid import (
    BINOMIAL_5_EXACT,
    build_gaussian_pyramid,
    build_laplacian_pyramid,
    expand,
    gaussian_reduce,
    generating_kernel,
    pyramid_dims,
)


def _frac_array(rows):
    return np.array([[float(v) for v in r] for r in rows])


def test_kernel_properties():
    assert sum(BINOMIAL_5_EXACT) == Fraction(1)
    w = generating_kernel()
    assert w.shape == (5, 5)
    assert abs(w.sum() - 1.0) <= 1e-12
    assert np.array_equal(w, w.T)
    assert np.array_equal(w, w[::-1, :]) and np.array_equal(w, w[:, ::-1])
    assert np.linalg.matrix_rank(w) == 1


@pytest.mark.parametrize("shape", [(2, 2), (5, 7), (16, 16), (9, 4)])
def test_reduce_constant(shape):
    out = gaussian_reduce(np.full(shape, 42.0))
    assert np.all(out == 42.0)


def test_reduce_ramp_4x4_matches_oracle():
    ramp = [[x + 4 * y for x in range(4)] for y in range(4)]
    # frozen from the exact rational nested-loop oracle
    expected = np.array([[15 / 4, 39 / 8], [33 / 4, 75 / 8]])
    assert np.allclose(_frac_array(naive_reduce(ramp)), expected, atol=0)
    assert np.allclose(gaussian_reduce(np.array(ramp, dtype=float)), expected, atol=1e-12)


def test_reduce_200_chain():
    img = np.zeros((200, 200))
    a = gaussian_reduce(img)
    assert a.shape == (100, 100)
    assert gaussian_reduce(a).shape == (50, 50)


def test_reduce_too_small():
    with pytest.raises(ImageTooSmall):
        gaussian_reduce(np.zeros((1, 5)))


def test_reduce_uint8_rounds_and_keeps_dtype():
    rng = np.random.default_rng(3)
    img = rng.integers(0, 256, (9, 11), dtype=np.uint8)
    out = gaussian_reduce(img)
    assert out.dtype == np.uint8
    assert np.array_equal(out, np.clip(np.rint(gaussian_reduce(img.astype(float))), 0, 255))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_reduce_matches_naive_oracle(h, w, seed):
    img = np.random.default_rng(seed).integers(0, 256, (h, w))
    ref = _frac_array(naive_reduce(img.tolist()))
    assert np.allclose(gaussian_reduce(img.astype(float)), ref, rtol=0, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 40), st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_reduce_stays_within_input_range(h, w, seed):
    img = np.random.default_rng(seed).uniform(-50, 300, (h, w))
    out = gaussian_reduce(img)
    assert out.max() <= img.max() + 1e-9
    assert out.min() >= img.min() - 1e-9


@pytest.mark.parametrize("size", [8, 9, 15, 16, 17, 31, 200, 201])
def test_dimension_law(size):
    gp = build_gaussian_pyramid(np.zeros((size, size + 3)), 3)
    for level, img in enumerate(gp):
        assert img.shape == (-(-size // 2**level), -(-(size + 3) // 2**level))
    assert pyramid_dims(size + 3, size, 3) == [(im.shape[1], im.shape[0]) for im in gp]


def test_gaussian_pyramid_basics():
    img = np.random.default_rng(0).uniform(0, 255, (200, 200))
    assert build_gaussian_pyramid(img, 1)[0] is img
    gp = build_gaussian_pyramid(img, 3)
    assert [g.shape for g in gp] == [(200, 200), (100, 100), (50, 50)]
    assert gp[0] is img
    assert np.array_equal(gp[2], gaussian_reduce(gp[1]))
    for g in build_gaussian_pyramid(np.full((32, 32), 9.0), 3):
        assert np.all(g == 9.0)


def test_gaussian_pyramid_too_small():
    with pytest.raises(ImageTooSmall):
        build_gaussian_pyramid(np.zeros((7, 20)), 3)


def test_gaussian_pyramid_multichannel_matches_per_channel():
    img = np.random.default_rng(1).uniform(0, 255, (20, 18, 3))
    gp = build_gaussian_pyramid(img, 3)
    for c in range(3):
        per = build_gaussian_pyramid(img[:, :, c], 3)
        for a, b in zip(gp, per):
            assert np.allclose(a[:, :, c], b, atol=1e-12)


@pytest.mark.parametrize("src,target", [((2, 2), (4, 4)), ((3, 3), (5, 6)), ((1, 1), (2, 2)), ((4, 5), (7, 10))])
def test_expand_constant_and_shape(src, target):
    out = expand(np.full(src, 5.0), target[1], target[0])
    assert out.shape == target
    assert np.allclose(out, 5.0, atol=1e-12)


def test_expand_ramp_3x3_to_6x6():
    r3 = [[x + 3 * y for x in range(3)] for y in range(3)]
    oracle = _frac_array(naive_expand(r3, 6, 6))
    # frozen first and last rows of the exact oracle
    assert np.array_equal(oracle[0], [1, 5 / 4, 7 / 4, 9 / 4, 21 / 8, 11 / 4])
    assert np.array_equal(oracle[5], [25 / 4, 13 / 2, 7, 15 / 2, 63 / 8, 8])
    assert np.allclose(expand(np.array(r3, float), 6, 6), oracle, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.booleans(), st.booleans(), st.integers(0, 2**32 - 1))
def test_expand_matches_naive_oracle(h, w, odd_h, odd_w, seed):
    th = 2 * h - 1 if odd_h else 2 * h
    tw = 2 * w - 1 if odd_w else 2 * w
    if th < 2 or tw < 2:
        return
    img = np.random.default_rng(seed).integers(0, 256, (h, w))
    assert np.allclose(expand(img.astype(float), tw, th), _frac_array(naive_expand(img.tolist(), th, tw)), atol=1e-9)


def test_expand_rejects_bad_target():
    with pytest.raises(InvalidTargetSize):
        expand(np.zeros((3, 3)), 7, 6)
    with pytest.raises(InvalidTargetSize):
        expand(np.zeros((1, 3)), 6, 1)


def test_laplacian_constant_bands_zero():
    gp = build_gaussian_pyramid(np.full((16, 16), 3.0), 3)
    lp = build_laplacian_pyramid(gp)
    for band in lp.bands:
        assert np.allclose(band, 0.0, atol=1e-12)
    assert np.all(lp.residual == 3.0)
    assert [b.shape for b in lp.bands] == [(16, 16), (8, 8)]


def test_laplacian_8x8_random_reconstruction():
    img = np.random.default_rng(8).uniform(0, 255, (8, 8))
    gp = build_gaussian_pyramid(img, 3)
    lp = build_laplacian_pyramid(gp)
    assert np.max(np.abs(lp.reconstruct() - img)) < 1e-9
    for k, band in enumerate(lp.bands):
        h, w = gp[k].shape
        assert np.allclose(band + expand(gp[k + 1], w, h), gp[k], atol=1e-12)


def test_laplacian_needs_two_levels():
    with pytest.raises(ValueError):
        build_laplacian_pyramid([np.zeros((4, 4))])
