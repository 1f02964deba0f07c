"""Reference waves, determinants, admissibility, and certificates."""
import math

import numpy as np
import pytest

from artifact import (
    CertificateError,
    ConfigurationError,
    PlaneWave,
    Roi,
    ShapeError,
    SingularPointError,
    SphericalWave,
    admissibility_ratio,
    build_lattice,
    build_triples,
    eval_wave,
    mu,
    plane_certificate,
    plane_design,
    spherical_certificate,
    spherical_design,
    try_certificate,
    zero_excluded,
)


def test_plane_wave_values():
    g = PlaneWave(wavevector=(math.pi,), amplitude=1.0)
    assert eval_wave(g, (1.0,)) == pytest.approx(-1.0 + 0.0j, abs=1e-15)
    batch = g.evaluate(np.array([[0.0], [0.5], [1.0]]))
    np.testing.assert_allclose(batch, [1.0, 1.0j, -1.0], atol=1e-15)
    np.testing.assert_allclose(g.magnitude(np.zeros((3, 1))), 1.0)


def test_spherical_wave_values():
    g = SphericalWave(wavenumber=math.pi, amplitude=1.0, dimension=2)
    val = g.evaluate((2.0, 0.0))
    assert val == pytest.approx(0.5 + 0.0j, abs=1e-15)
    assert g.magnitude((0.0, 4.0)) == pytest.approx(0.25)


def test_spherical_wave_singularity():
    g = SphericalWave(wavenumber=1.0, amplitude=1.0, dimension=2)
    with pytest.raises(SingularPointError):
        g.evaluate((0.0, 0.0))
    with pytest.raises(SingularPointError):
        g.magnitude(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_wave_construction_validation():
    with pytest.raises(ConfigurationError):
        SphericalWave(wavenumber=0.0, amplitude=2.0)
    with pytest.raises(ConfigurationError):
        SphericalWave(wavenumber=1.0, amplitude=0.0)
    with pytest.raises(ConfigurationError):
        PlaneWave(wavevector=(1.0,), amplitude=-1.0)
    with pytest.raises(ConfigurationError):
        PlaneWave(wavevector=())
    with pytest.raises(ShapeError):
        PlaneWave(wavevector=(1.0, 2.0)).evaluate((1.0,))


def test_mu_vanishes_on_repeated_point():
    g = PlaneWave(wavevector=(1.3,))
    assert mu(g, 2, ((3,), (3,), (2,))) == 0.0


def test_mu_plane_worked_example():
    seq = plane_design(1, phase_scale=1.0)
    g = seq.wave_at(3)
    value = mu(g, 3, ((5,), (6,), (4,)))
    expected = 4 * math.sin(math.pi / 4) * math.sin(math.pi / 8) ** 2
    assert value == pytest.approx(expected, rel=1e-12)
    assert value == pytest.approx(0.414214, abs=5e-7)


def test_mu_plane_closed_form_random():
    rng = np.random.default_rng(31)
    for _ in range(300):
        n = int(rng.integers(0, 7))
        theta = rng.uniform(0.05, 3.1)
        a = rng.uniform(0.5, 2.0)
        k = int(rng.integers(-30, 30))
        g = PlaneWave(wavevector=(theta * 2.0**n,), amplitude=a)
        got = mu(g, n, ((k,), (k + 1,), (k - 1,)))
        want = 4 * a**2 * math.sin(theta) * math.sin(theta / 2) ** 2
        assert got == pytest.approx(want, rel=1e-11, abs=1e-13)


def test_mu_spherical_closed_form_random():
    rng = np.random.default_rng(32)
    for _ in range(1000):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(1, 7))
        k = rng.integers(-8, 9, size=d)
        if not np.any(k):
            k[0] = 3
        norm = float(np.linalg.norm(k))
        w = rng.uniform(0.3, 2.8)
        nu = float(rng.choice([-1.0, 1.0])) * w * 2.0 ** (2 * n) / norm
        a = rng.uniform(0.5, 2.0)
        g = SphericalWave(wavenumber=nu, amplitude=a, dimension=d)
        scale = 2**n
        kp = k * (scale + 1) / scale
        km = k * (scale - 1) / scale
        got = abs(mu(g, n, (k, kp, km)))
        phase = 2.0 ** (-2 * n) * abs(nu) * norm
        want = (
            (2.0 ** (2 * n + 2) * a**2 / norm**2)
            / ((1 - 2.0**-n) * (1 + 2.0**-n))
            * abs(math.sin(phase))
            * math.sin(phase / 2) ** 2
        )
        assert got == pytest.approx(want, rel=1e-10)


def test_mu_spherical_degenerate_phase():
    # radial phase increment an exact multiple of 2*pi kills the determinant
    n, k = 1, 4
    nu = 2 * math.pi * 2.0 ** (2 * n) / k
    g = SphericalWave(wavenumber=nu, amplitude=1.0, dimension=1)
    value = mu(g, n, ((k,), (k * 1.5,), (k * 0.5,)))
    assert abs(value) < 1e-12


def _plane_report(phase_scale, level, margins=3):
    roi = Roi((1.0,), (2.0,))
    lat = build_lattice(roi, margins, level)
    triples = build_triples(lat, "plane", axis=0)
    seq = plane_design(1, phase_scale=phase_scale)
    return admissibility_ratio(seq.wave_at(level), triples)


def test_admissibility_plane_design():
    ratios = []
    for n in range(1, 11):
        report = _plane_report(0.999, n)
        assert report.distinct
        assert report.sup_magnitude == pytest.approx(1.0)
        ratios.append(report.ratio)
    assert max(ratios) - min(ratios) < 1e-9
    assert ratios[0] == pytest.approx(1.8509669723314555, rel=1e-9)
    exact = _plane_report(1.0, 4)
    assert exact.ratio == pytest.approx(1.8477590650225737, rel=1e-9)


def test_admissibility_triple_independence():
    report = _plane_report(0.999, 5)
    per = report.per_triple
    assert per.max() - per.min() < 1e-12


def test_admissibility_constant_wave_infinite():
    roi = Roi((1.0,), (2.0,))
    triples = build_triples(build_lattice(roi, 2, 2), "plane", axis=0)
    report = admissibility_ratio(PlaneWave(wavevector=(0.0,)), triples)
    assert math.isinf(report.ratio)
    assert not report.distinct


def test_distinctness_does_not_bound_ratio():
    # phase step pi: differences are nonzero but the determinants (which
    # vanish analytically) are at rounding scale, so the ratio explodes
    roi = Roi((1.0,), (2.0,))
    triples = build_triples(build_lattice(roi, 2, 3), "plane", axis=0)
    seq = plane_design(1, phase_scale=4.0)
    report = admissibility_ratio(seq.wave_at(3), triples)
    assert report.distinct
    assert report.ratio > 1e12


def test_wave_sequences_scale_with_level():
    seq = plane_design(2, phase_scale=0.5, amplitude=1.5)
    g3, g4 = seq.wave_at(3), seq.wave_at(4)
    assert g4.wavevector[0] == pytest.approx(2 * g3.wavevector[0])
    assert g3.amplitude == 1.5
    sph = spherical_design(1, base_wavenumber=0.3)
    assert sph.wave_at(5).wavenumber == pytest.approx(2 * sph.wave_at(4).wavenumber)


def test_plane_certificate_values():
    seq = plane_design(1, phase_scale=1.0)
    expected = 1.0 / (2 * math.sin(math.pi / 4) * math.sin(math.pi / 8) ** 2)
    for n in (1, 4, 8):
        assert plane_certificate(seq, n) == pytest.approx(expected, abs=1e-9)
    double = plane_design(1, phase_scale=1.0, amplitude=2.0)
    assert plane_certificate(double, 3) == pytest.approx(expected / 2, abs=1e-9)
    assert plane_certificate(double, 3) == pytest.approx(2.4142, abs=5e-5)


def test_plane_certificate_degenerate():
    seq = plane_design(1, phase_scale=4.0)  # phase step pi
    with pytest.raises(CertificateError) as err:
        plane_certificate(seq, 2)
    assert err.value.reason == "degenerate-phase"
    with pytest.raises(ConfigurationError):
        plane_certificate(seq, 2, axis=5)


def test_spherical_certificate_worked_example():
    seq = spherical_design(1, base_wavenumber=0.3)
    roi = Roi((2.0,), (3.0,))
    got = spherical_certificate(seq, roi, 2, 1)
    assert got.phase_gap == pytest.approx(0.3, rel=1e-12)
    assert got.difference_scale == pytest.approx(4.5, rel=1e-12)
    assert got.bound == pytest.approx(681.8713903182456, rel=1e-12)


def test_spherical_certificate_failures():
    seq = spherical_design(1, base_wavenumber=0.3)
    with pytest.raises(CertificateError) as err:
        spherical_certificate(seq, Roi((1.0,), (2.0,)), 2, 2)
    assert err.value.reason == "origin-not-excluded"

    hot = spherical_design(1, base_wavenumber=3.0)
    with pytest.raises(CertificateError) as err:
        spherical_certificate(hot, Roi((2.0,), (3.0,)), 2, 1)
    assert err.value.reason == "phase-bound-exceeded"

    roi = Roi((2.0,), (3.0,))
    with pytest.raises(CertificateError) as err:
        spherical_certificate(seq, roi, 2, 2, phase_gap=10.0)
    assert err.value.reason == "alpha-invalid"
    with pytest.raises(CertificateError) as err:
        spherical_certificate(seq, roi, 2, 2, difference_scale=0.01)
    assert err.value.reason == "beta-too-small"


def test_spherical_certificate_overrides():
    seq = spherical_design(1, base_wavenumber=0.3)
    roi = Roi((2.0,), (3.0,))
    tight = spherical_certificate(seq, roi, 2, 2)
    loose = spherical_certificate(
        seq, roi, 2, 2, phase_gap=tight.phase_gap / 2, difference_scale=10.0
    )
    assert loose.bound > tight.bound


def test_certificates_dominate_ratio():
    # plane design, 1D and 2D
    for dim, margins in ((1, 3), (2, (2, 2))):
        roi = Roi((1.0,) * dim, (2.0,) * dim)
        seq = plane_design(dim, phase_scale=0.999)
        for n in range(1, 9):
            triples = build_triples(build_lattice(roi, margins, n), "plane", axis=0)
            report = admissibility_ratio(seq.wave_at(n), triples)
            cert = plane_certificate(seq, n)
            assert report.ratio <= cert + 1e-12
    # spherical design, 1D and 2D
    for dim, eps in ((1, 0.3), (2, 0.15)):
        roi = Roi((2.0,) * dim, (3.0,) * dim)
        margins = (2,) * dim
        seq = spherical_design(dim, base_wavenumber=eps)
        for n in range(1, 9):
            triples = build_triples(build_lattice(roi, margins, n), "spherical")
            report = admissibility_ratio(seq.wave_at(n), triples)
            cert = spherical_certificate(seq, roi, margins, n)
            assert report.distinct
            assert report.ratio <= cert.bound + 1e-12


def test_spherical_sup_magnitude_bounds():
    roi = Roi((2.0,), (3.0,))
    seq = spherical_design(1, base_wavenumber=0.3)
    witness = zero_excluded(roi, 2)
    q = witness.distance_bound
    for n in range(1, 9):
        triples = build_triples(build_lattice(roi, 2, n), "spherical")
        report = admissibility_ratio(seq.wave_at(n), triples)
        # companions shrink radii by at most the factor (1 - 2**-n)
        general = 1.0 / ((1 - 2.0**-n) * q)
        assert report.sup_magnitude <= general * (1 + 1e-12)
        if n >= 2:
            assert report.sup_magnitude <= 1.0 / q + 1e-12


def test_try_certificate_paths():
    roi = Roi((2.0,), (3.0,))
    assert try_certificate(spherical_design(1, 0.3), roi, 2, 3) == pytest.approx(
        spherical_certificate(spherical_design(1, 0.3), roi, 2, 3).bound
    )
    assert try_certificate(plane_design(1, 4.0), roi, 3, 2) is None
    assert try_certificate(spherical_design(1, 0.3), Roi((1.0,), (2.0,)), 2, 2) is None
