import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from uwrestore.color import (ColorParams, channel_means, color_balance, compensate_channels,
                             correct_color, sigmoid)

images = arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 8), st.just(3)),
                elements=st.floats(0, 1))


def test_channel_means_constant_image():
    img = np.empty((4, 5, 3))
    img[...] = (0.2, 0.5, 0.8)
    assert channel_means(img) == pytest.approx((0.2, 0.5, 0.8), abs=1e-15)


def test_channel_means_two_pixels():
    img = np.zeros((2, 1, 3))
    img[1, 0, 0] = 1.0
    assert channel_means(img)[0] == 0.5


def test_channel_means_match_summation():
    img = np.random.default_rng(3).uniform(size=(6, 9, 3))
    expected = [sum(img[i, j, c] for i in range(6) for j in range(9)) / 54 for c in range(3)]
    assert channel_means(img) == pytest.approx(expected, abs=1e-14)


def test_channel_means_empty():
    with pytest.raises(ValueError):
        channel_means(np.zeros((0, 3, 3)))


def test_single_pixel_compensation_value():
    img = np.array([[[0.2, 0.6, 0.3]]])
    out = compensate_channels(img)
    w = (1 - 1 / (1 + math.exp(-0.2))) ** 2
    assert out[0, 0, 0] == pytest.approx(0.2 + 5 * w * 0.4 * 0.2, abs=1e-15)
    wb = (1 - 1 / (1 + math.exp(-0.3))) ** 2
    assert out[0, 0, 2] == pytest.approx(0.3 + 5 * wb * 0.3 * 0.3, abs=1e-15)
    assert out[0, 0, 1] == 0.6


def test_zero_pixel_stays_zero():
    img = np.zeros((2, 2, 3))
    img[..., 1] = 0.4
    img[0, 0, 0] = 0.1
    out = compensate_channels(img)
    assert out[1, 1, 0] == 0.0


def test_zero_gap_leaves_channel_unchanged():
    rng = np.random.default_rng(5)
    g = rng.uniform(0.3, 0.7, size=(5, 5))
    img = np.dstack([g[::-1], g, 0.5 * g])
    out = compensate_channels(img)
    assert np.allclose(out[..., 0], img[..., 0], atol=1e-15)


def test_blue_donor_branch():
    img = np.empty((3, 3, 3))
    img[...] = (0.1, 0.3, 0.6)
    out = compensate_channels(img)
    assert np.all(out[..., 2] == 0.6)
    assert np.all(out[..., 0] > 0.1) and np.all(out[..., 1] > 0.3)


def test_tie_uses_green_donor():
    img = np.empty((2, 2, 3))
    img[...] = (0.1, 0.4, 0.4)
    out = compensate_channels(img)
    assert np.all(out[..., 1] == 0.4)
    assert np.all(out[..., 2] == 0.4)


@settings(max_examples=60, deadline=None)
@given(images)
def test_compensation_monotone_and_bounded(img):
    out = compensate_channels(img)
    assert out.min() >= 0 and out.max() <= 1
    means = channel_means(img)
    donor = 1 if means[1] >= means[2] else 2
    assert np.array_equal(out[..., donor], img[..., donor])
    for c in range(3):
        if c != donor and means[donor] - means[c] >= 0:
            assert np.all(out[..., c] >= img[..., c])


def test_balance_pixel_at_mean():
    img = np.empty((3, 1, 3))
    img[:, 0, :] = np.array([0.2, 0.4, 0.6])[:, None]
    out = color_balance(img)
    assert np.allclose(out[1, 0], 0.5, atol=1e-15)


def test_balance_pixel_one_spread_above_mean():
    # values {0, 1}: mean 0.5, std 0.5, so 1 sits at mean + phi*std when phi = 1
    img = np.zeros((2, 1, 3))
    img[1] = 1.0
    out = color_balance(img, ColorParams(phi=1.0))
    assert np.allclose(out[1, 0], 1.0, atol=1e-15)
    assert np.allclose(out[0, 0], 0.0, atol=1e-15)


def test_balance_matches_formula():
    p = ColorParams()
    img = np.random.default_rng(7).uniform(size=(10, 12, 3))
    out = color_balance(img, p, clip=False)
    for c in range(3):
        ch = img[..., c]
        expected = 0.5 * (1 + (ch - ch.mean()) / (p.phi * ch.std()))
        assert np.allclose(out[..., c], expected, atol=1e-14)
    assert np.allclose(out.reshape(-1, 3).mean(axis=0), 0.5, atol=1e-12)


def test_balance_constant_channel():
    img = np.full((4, 4, 3), 0.3)
    assert np.allclose(color_balance(img), 0.5, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(images)
def test_balance_preclamp_mean_property(img):
    out = color_balance(img, clip=False)
    assert np.allclose(out.reshape(-1, 3).mean(axis=0), 0.5, atol=1e-9)
    clipped = color_balance(img)
    assert clipped.min() >= 0 and clipped.max() <= 1


def test_params_validation():
    with pytest.raises(ValueError):
        ColorParams(d=0)
    with pytest.raises(ValueError):
        ColorParams(phi=-1)
    with pytest.raises(ValueError):
        ColorParams(epsilon_var=0)


def test_sigmoid_and_pipeline_shape():
    assert sigmoid(0.0) == 0.5
    img = np.random.default_rng(0).uniform(size=(5, 6, 3))
    out = correct_color(img)
    assert out.shape == img.shape and out.min() >= 0 and out.max() <= 1
