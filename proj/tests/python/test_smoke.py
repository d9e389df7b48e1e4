"""Smoke tests for the illumgap extension module."""

import math

import numpy as np
import pytest

import illumgap as ilg


def test_setting_grid():
    grid = ilg.setting_grid()
    assert len(grid) == 15
    warm_m2 = ilg.grid_setting(ilg.LightColor.WARM, -2)
    assert warm_m2.lux == 180.0
    assert warm_m2.kelvin == 3222.0
    assert "180Lux, 3222K" in ilg.setting_grid_table()


def test_kelvin_gain_anchor():
    r, g, b = ilg.kelvin_to_gain(6600.0)
    assert r == pytest.approx(1.0, abs=1e-9)
    assert g == pytest.approx(1.0, abs=1e-9)
    assert b == pytest.approx(1.0, abs=1e-9)
    r, g, b = ilg.kelvin_to_gain(3222.0)
    assert r == 1.0 and g < 1.0 and b < g
    with pytest.raises(Exception):
        ilg.kelvin_to_gain(100.0)


def test_color_space_round_trip():
    assert ilg.rgb_to_hsv(1.0, 0.0, 0.0) == pytest.approx((0.0, 1.0, 1.0))
    assert ilg.hsv_to_rgb(0.5, 1.0, 1.0) == pytest.approx((0.0, 1.0, 1.0))
    v = ilg.gamma_transfer(0.18, "encode")
    assert v == pytest.approx(0.18 ** (1 / 2.2))
    assert ilg.gamma_transfer(v, "decode") == pytest.approx(0.18, abs=1e-9)


def test_render_deterministic():
    s = ilg.grid_setting(ilg.LightColor.MIXED, 2)
    a = ilg.render_sample(3, 42, 32, s, noise_seed=7)
    b = ilg.render_sample(3, 42, 32, s, noise_seed=7)
    assert a.shape == (32, 32, 3)
    assert np.array_equal(a, b)
    assert a.min() >= 0.0 and a.max() <= 1.0


def test_gray_card_and_mapping():
    opts = ilg.RenderOptions(noise_sigma=0.0)
    white0 = ilg.grid_setting(ilg.LightColor.WHITE, 0)
    warm0 = ilg.grid_setting(ilg.LightColor.WARM, 0)
    v_src = ilg.gray_card_vector(white0, n_frames=3, opts=opts)
    v_dst = ilg.gray_card_vector(warm0, n_frames=3, opts=opts)
    ratio = ilg.mapping_ratio(v_src, v_dst)
    assert ratio.r > 1.0  # warm target raises red

    img = ilg.render_sample(0, 1, 16, white0, opts, 0)
    mapped = ilg.apply_vector_mapping(img, ratio)
    assert mapped.shape == img.shape
    assert mapped[..., 0].mean() > img[..., 0].mean()

    est = ilg.estimate_kelvin(v_dst)
    assert abs(est - warm0.kelvin) <= 50.0


def test_jitter_identity_and_bounds():
    img = ilg.render_sample(5, 9, 16, ilg.grid_setting(ilg.LightColor.WHITE, 0))
    out = ilg.apply_color_jitter(img, ilg.JitterParams(), seed=3)
    assert np.array_equal(out, img)

    strong = ilg.JitterParams(brightness=0.9, contrast=0.9, saturation=0.9, hue=0.5)
    out = ilg.apply_color_jitter(img, strong, seed=3)
    assert out.min() >= 0.0 and out.max() <= 1.0

    gray = ilg.adjust_color(img, "saturation", 0.0)
    assert np.allclose(gray[..., 0], gray[..., 1], atol=1e-6)


def test_tpe_quadratic():
    res = ilg.tpe_optimize(lambda x: -(x[0] - 0.3) ** 2, [("x", 0.0, 1.0)], n_trials=50, seed=1)
    assert len(res.history) == 50
    assert abs(res.best.params[0] - 0.3) < 0.1
    running = -math.inf
    for t in res.history:
        running = max(running, t.objective)
    assert running == res.best.objective


def test_build_dataset():
    images, labels = ilg.build_dataset("fsid", images_per_cell=1, size=12, threads=2)
    assert images.shape == (150, 12, 12, 3)
    assert set(labels.tolist()) == set(range(10))
    again, _ = ilg.build_dataset("fsid", images_per_cell=1, size=12, threads=1)
    assert np.array_equal(images, again)
