"""Built-in target functions: values, regularity metadata, validation."""
import math

import numpy as np
import pytest

from artifact import (
    ConfigurationError,
    ShapeError,
    builtin_target,
    eval_bspline,
)


def test_gaussian_chirp_frozen_value():
    f = builtin_target("gaussian_chirp", sigma=1.0, center=0.0, frequency=math.pi)
    # envelope e^{-1}, phase factor e^{i pi} = -1
    assert f.evaluate((1.0,)) == pytest.approx(-math.exp(-1.0), abs=1e-15)
    assert math.isinf(f.sobolev_smoothness)
    assert f.square_integrable


def test_gaussian_chirp_defaults():
    f = builtin_target("gaussian_chirp")
    assert f.evaluate((0.0,)) == pytest.approx(1.0 + 0.0j)
    pts = np.linspace(-2.0, 2.0, 9)[:, None]
    np.testing.assert_allclose(f.evaluate(pts), np.exp(-pts[:, 0] ** 2))


def test_modulated_gaussian_values():
    f = builtin_target(
        "modulated_gaussian", sigma=2.0, frequency=1.0, phase=math.pi / 2
    )
    # cosine zero at x = pi/2 regardless of envelope
    assert abs(f.evaluate((math.pi / 2,))) < 1e-15
    val = f.evaluate((0.0,))
    assert val == pytest.approx(1.0j, abs=1e-15)  # constant phase factor e^{i pi/2}


def test_bspline_bump_matches_spline():
    f = builtin_target("bspline_bump", order=2, center=0.0)
    assert f.evaluate((0.5,)) == pytest.approx(0.5 + 0.0j)
    assert f.sobolev_smoothness == pytest.approx(1.5)
    rng = np.random.default_rng(7)
    x = rng.uniform(-1.0, 3.0, size=64)
    np.testing.assert_allclose(
        f.evaluate(x[:, None]), eval_bspline(2, x).astype(complex), atol=1e-15
    )


def test_bspline_bump_center_and_phase():
    f = builtin_target("bspline_bump", order=2, center=1.5, phase=math.pi)
    # hat peak B_2(1) = 1 shifted to x = 2.5, phase factor e^{i pi}
    assert f.evaluate((2.5,)) == pytest.approx(-1.0 + 0.0j, abs=1e-12)
    assert f.evaluate((2.0,)) == pytest.approx(-0.5 + 0.0j, abs=1e-12)


def test_complex_constant():
    f = builtin_target("complex_constant", value=1 + 2j)
    assert f.evaluate((37.2,)) == 1 + 2j
    assert not f.square_integrable
    batch = f.evaluate(np.zeros((5, 1)))
    np.testing.assert_array_equal(batch, np.full(5, 1 + 2j))


def test_targets_bounded():
    rng = np.random.default_rng(11)
    pts = rng.uniform(-10.0, 10.0, size=(10_000, 2))
    for name, bound in [
        ("gaussian_chirp", 1.0),
        ("modulated_gaussian", 1.0),
        ("bspline_bump", 1.0),
    ]:
        f = builtin_target(name, dimension=2)
        assert np.abs(f.evaluate(pts)).max() <= bound + 1e-12


def test_two_dimensional_chirp():
    f = builtin_target(
        "gaussian_chirp", dimension=2, sigma=2.0, center=(1.0, -1.0), frequency=(0.5, 0.25)
    )
    x = np.array([1.0, -1.0])
    want = math.e**0 * np.exp(1j * (0.5 * 1.0 + 0.25 * -1.0))
    assert f.evaluate(x) == pytest.approx(want, abs=1e-15)


def test_batch_matches_single():
    f = builtin_target("gaussian_chirp", sigma=1.3, frequency=2.0)
    pts = np.linspace(-1.0, 1.0, 7)[:, None]
    batch = f.evaluate(pts)
    singles = [f.evaluate(tuple(p)) for p in pts]
    np.testing.assert_allclose(batch, singles, atol=1e-15)


def test_target_validation_errors():
    with pytest.raises(ConfigurationError):
        builtin_target("no_such_target")
    with pytest.raises(ConfigurationError):
        builtin_target("gaussian_chirp", sigma=-1.0)
    with pytest.raises(ConfigurationError):
        builtin_target("gaussian_chirp", wavelength=3.0)
    with pytest.raises(ConfigurationError):
        builtin_target("gaussian_chirp", dimension=2, center=(1.0, 2.0, 3.0))
    with pytest.raises(ConfigurationError):
        builtin_target("bspline_bump", order=0)
    with pytest.raises(ConfigurationError):
        builtin_target("gaussian_chirp", dimension=0)
    f = builtin_target("gaussian_chirp", dimension=2)
    with pytest.raises(ShapeError):
        f.evaluate((1.0,))


def test_labels_record_parameters():
    assert "2.5" in builtin_target("gaussian_chirp", sigma=2.5).label
    assert "order=3" in builtin_target("bspline_bump", order=3).label
