"""Intensity simulation, bounded noise, and lossless CSV round trips."""
import math

import numpy as np
import pytest

from artifact import (
    IntensityRecord,
    PlaneWave,
    Roi,
    build_lattice,
    build_triples,
    builtin_target,
    intensity,
    perturb_intensities,
    quasi_intensities,
    read_intensity_csv,
    sample_intensities,
    spherical_design,
    write_intensity_csv,
)


def _zero_target(dimension=1):
    return builtin_target("complex_constant", dimension=dimension, value=0.0)


def test_intensity_reduces_to_wave_power():
    g = PlaneWave(wavevector=(1.7,), amplitude=1.5)
    pts = np.linspace(0.0, 3.0, 11)[:, None]
    np.testing.assert_allclose(intensity(_zero_target(), g, pts), 2.25, atol=1e-14)


def test_intensity_destructive_and_frozen_value():
    # f = -g at x: total field cancels
    g = PlaneWave(wavevector=(0.0,), amplitude=1.0)
    f = builtin_target("complex_constant", value=-1.0)
    assert intensity(f, g, (0.3,)) == pytest.approx(0.0, abs=1e-15)
    # f + g = (1+2i) + (3-i) = 4+i at x=1: intensity 17
    f = builtin_target("complex_constant", value=1 + 2j)
    amp = math.sqrt(10.0)
    phase = math.atan2(-1.0, 3.0)  # g(1) = sqrt(10) e^{i phase} = 3 - i
    g = PlaneWave(wavevector=(phase,), amplitude=amp)
    assert intensity(f, g, (1.0,)) == pytest.approx(17.0, rel=1e-12)


def test_intensity_expansion_identity():
    rng = np.random.default_rng(5)
    f = builtin_target("gaussian_chirp", sigma=1.2, frequency=2.0)
    g = PlaneWave(wavevector=(0.9,), amplitude=1.3)
    x = rng.uniform(-2.0, 2.0, size=(1000, 1))
    fv, gv = f.evaluate(x), g.evaluate(x)
    expanded = np.abs(fv) ** 2 + np.abs(gv) ** 2 + 2 * np.real(fv * np.conj(gv))
    np.testing.assert_allclose(intensity(f, g, x), expanded, rtol=1e-12)


def _unit_triples(level=2):
    lattice = build_lattice(Roi((1.0,), (2.0,)), 2, level)
    return build_triples(lattice, "plane", axis=0)


def test_sample_intensities_structure():
    triples = _unit_triples()
    g = PlaneWave(wavevector=(1.0,), amplitude=1.0)
    records = sample_intensities(_zero_target(), g, triples)
    assert len(records) == len(triples)
    assert all(rec.level == 2 for rec in records)
    # zero target, unit amplitude: every intensity is exactly 1
    for rec in records:
        assert rec.base == pytest.approx(1.0, abs=1e-15)
        assert rec.plus == pytest.approx(1.0, abs=1e-15)
        assert rec.minus == pytest.approx(1.0, abs=1e-15)


def test_sample_intensities_matches_pointwise():
    triples = _unit_triples()
    f = builtin_target("gaussian_chirp", sigma=2.0, center=1.5, frequency=0.5)
    g = PlaneWave(wavevector=(2.0,), amplitude=1.2)
    records = sample_intensities(f, g, triples)
    spacing = 2.0**-2
    for rec, (k, kp, km) in zip(records, triples):
        assert rec.k == tuple(int(v) for v in k)
        x = np.asarray(k, dtype=float) * spacing
        assert rec.base == pytest.approx(intensity(f, g, tuple(x)), rel=1e-14)
        xp = np.asarray(kp, dtype=float) * spacing
        assert rec.plus == pytest.approx(intensity(f, g, tuple(xp)), rel=1e-14)


def test_quasi_intensities_cases():
    triples = _unit_triples()
    g = PlaneWave(wavevector=(1.1,), amplitude=1.0)
    triple = next(iter(triples))
    # constant target: quasi and true companion intensities coincide
    f = builtin_target("complex_constant", value=0.4 - 0.2j)
    a_plus, a_minus = quasi_intensities(f, g, 2, triple)
    records = sample_intensities(f, g, triples)
    assert a_plus == pytest.approx(records[0].plus, rel=1e-14)
    assert a_minus == pytest.approx(records[0].minus, rel=1e-14)
    # zero target: quasi intensities are the wave powers at the companions
    z = _zero_target()
    a_plus, a_minus = quasi_intensities(z, g, 2, triple)
    assert a_plus == pytest.approx(1.0, abs=1e-14)
    assert a_minus == pytest.approx(1.0, abs=1e-14)


def test_quasi_gap_shrinks_with_level():
    f = builtin_target("gaussian_chirp", sigma=2.0, center=1.5, frequency=0.5)
    g = spherical_design(1, base_wavenumber=0.3)
    gaps = []
    for level in (3, 4, 5):
        lattice = build_lattice(Roi((2.0,), (3.0,)), 2, level)
        triples = build_triples(lattice, "spherical")
        wave = g.wave_at(level)
        records = sample_intensities(f, wave, triples)
        worst = 0.0
        for rec, triple in zip(records, triples):
            a_plus, a_minus = quasi_intensities(f, wave, level, triple)
            worst = max(worst, abs(a_plus - rec.plus), abs(a_minus - rec.minus))
        gaps.append(worst)
    assert gaps[2] < gaps[1] < gaps[0]


def _toy_records():
    triples = _unit_triples()
    f = builtin_target("gaussian_chirp", sigma=1.5, center=1.2, frequency=3.0)
    g = PlaneWave(wavevector=(2.2,), amplitude=1.1)
    return sample_intensities(f, g, triples)


def test_perturb_identity_and_reproducibility():
    records = _toy_records()
    same = perturb_intensities(records, 0.0, seed=3)
    assert same == records
    assert same is not records
    one = perturb_intensities(records, 1e-3, seed=42)
    two = perturb_intensities(records, 1e-3, seed=42)
    other = perturb_intensities(records, 1e-3, seed=43)
    assert one == two
    assert one != other


def test_perturb_bounded_and_clipped():
    records = _toy_records()
    scale = 0.25
    noisy = perturb_intensities(records, scale, seed=9)
    for rec, pert in zip(records, noisy):
        for clean, dirty in [
            (rec.base, pert.base), (rec.plus, pert.plus), (rec.minus, pert.minus)
        ]:
            assert abs(dirty - clean) <= scale * clean + 1e-15
    # noise amplitudes above 1 can push intensities negative; clipping floors them
    floored = perturb_intensities(records, 2.0, seed=1)
    assert all(
        p.base >= 0.0 and p.plus >= 0.0 and p.minus >= 0.0 for p in floored
    )
    with pytest.raises(ValueError):
        perturb_intensities(records, -0.5, seed=0)


def test_csv_round_trip_bit_exact(tmp_path):
    records = _toy_records()
    path = tmp_path / "intensities.csv"
    write_intensity_csv(records, path)
    back = read_intensity_csv(path)
    assert back == records
    # rewriting the parsed records reproduces the bytes exactly
    second = tmp_path / "again.csv"
    write_intensity_csv(back, second)
    assert second.read_bytes() == path.read_bytes()


def test_csv_round_trip_extreme_floats(tmp_path):
    records = [
        IntensityRecord(
            level=3,
            k=(-7,),
            k_plus=(-6.0,),
            k_minus=(-8.0,),
            base=0.1 + 0.2,  # not exactly 0.3
            plus=1e-300,
            minus=12345.6789012345678,
        )
    ]
    path = tmp_path / "edge.csv"
    write_intensity_csv(records, path)
    assert read_intensity_csv(path) == records


def test_csv_round_trip_2d(tmp_path):
    lattice = build_lattice(Roi((2.0, 2.0), (3.0, 3.0)), (2, 2), 2)
    triples = build_triples(lattice, "spherical")
    f = builtin_target("gaussian_chirp", dimension=2, sigma=2.0, center=2.5)
    g = spherical_design(2, base_wavenumber=0.15).wave_at(2)
    records = sample_intensities(f, g, triples)
    path = tmp_path / "planar.csv"
    write_intensity_csv(records, path)
    back = read_intensity_csv(path)
    assert back == records
    assert len(back[0].k) == 2
    assert isinstance(back[0].k_plus[0], float)


def test_csv_errors(tmp_path):
    with pytest.raises(ValueError):
        write_intensity_csv([], tmp_path / "empty.csv")
    bogus = tmp_path / "bogus.csv"
    bogus.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        read_intensity_csv(bogus)
    truncated = tmp_path / "short.csv"
    truncated.write_text("level,k1,kp1,intensity_base\n")
    with pytest.raises(ValueError):
        read_intensity_csv(truncated)
