import math

import numpy as np
import pytest

import rweld


def test_covariance_closed_form():
    assert rweld.covariance_exact(0.5) == pytest.approx(-math.log(2.0), abs=1e-12)
    # Direct n-term sum of cos(2 pi k lag) / k.
    direct = sum(math.cos(2 * math.pi * k / 6) / k for k in range(1, 65))
    assert rweld.covariance_truncated(64, 1 / 6) == pytest.approx(direct, rel=1e-12)


def test_measure_is_normalized_and_positive():
    masses, total = rweld.sample_measure(0.7, 1024, 3)
    assert masses.shape == (1024,)
    assert np.all(masses > 0)
    assert masses.sum() == pytest.approx(total, rel=1e-12)
    uniform, _ = rweld.sample_measure(0.0, 256, 1)
    assert np.allclose(uniform, 1 / 256)


def test_homeo_knots_increase():
    knots = rweld.homeo_knots(1.0, 2048, 5)
    assert knots[0] == 0.0 and knots[-1] == pytest.approx(1.0)
    assert np.all(np.diff(knots) > 0)


def test_supercritical_beta_rejected():
    with pytest.raises(rweld.ConfigError):
        rweld.sample_measure(1.6, 256, 1)
    masses, _ = rweld.sample_measure(1.6, 256, 1, exploratory=True)
    assert masses.size == 256


def test_identity_weld_is_the_circle():
    res = rweld.weld(0.0, 1, cells=1024, grid=128)
    assert res["flags"] == []
    assert rweld.hausdorff_distance(list(res["curve"]), rweld.unit_circle(4096)) < 1e-2
    assert res["welding_defect"] < 1e-3


def test_random_weld_runs():
    res = rweld.weld(0.3, 2, cells=4096, grid=128)
    curve = res["curve"]
    assert curve.dtype == np.complex128
    assert res["simple"] == rweld.is_simple_polygon(list(curve))


def test_lehto_integral_with_python_callable():
    value, err = rweld.lehto_integral(lambda z: 1.0, 1.0, 1 / 32, 1.0, 16, 8)
    assert value == pytest.approx(math.log(32) / (2 * math.pi), rel=1e-12)
    assert err < 1e-12


def test_lehto_samples_shape():
    seg, lk = rweld.lehto_samples(0.0, p=1, n_max=3, samples=4, cells=1024)
    assert seg.shape == (4, 3) and lk.shape == (4, 3)
    assert np.allclose(seg, math.log(2) / (2 * math.pi), rtol=1e-9)


def test_moment_order_past_the_threshold_is_rejected():
    with pytest.raises(rweld.ArgumentError):
        rweld.moment_scaling(1.0, 2.0)
