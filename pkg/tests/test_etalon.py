import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from membrane_etalon import (
    DivergenceError,
    DomainError,
    EtalonGeometry,
    ModelValidityWarning,
    SlabCoefficients,
    finesse_fwhm,
    fringe_scan,
    nearest_resonant_length,
    peak_transmission,
    round_trip_factor,
    steady_transmission,
)


def _pair(R):
    c = SlabCoefficients.from_reflectivity(R)
    return c, c


def test_finesse_bench_values():
    # independent closed form: finesse = pi / arccos((4R - 1 - R^2) / 2R)
    for R, expected in ((0.3618, 2.809003395), (0.3571, 2.765637598),
                        (0.2652, 1.977378053)):
        assert finesse_fwhm(*_pair(R)) == pytest.approx(expected, rel=1e-6)


def test_finesse_matches_arccos_form_generally():
    for R in (0.18, 0.5, 0.85, 0.995):
        analytic = np.pi / np.arccos((4.0 * R - 1.0 - R * R) / (2.0 * R))
        assert finesse_fwhm(*_pair(R)) == pytest.approx(analytic, rel=1e-8)


def test_finesse_undefined_below_min_contrast():
    # Airy dip never falls to half maximum once |mu| < 3 - 2 sqrt(2)
    with pytest.raises(DomainError):
        finesse_fwhm(*_pair(0.17))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.18, 0.99), st.floats(0.18, 0.99))
def test_finesse_monotone_in_contrast(r_low, r_high):
    lo, hi = sorted((r_low, r_high))
    if hi - lo < 1e-6:
        return
    assert finesse_fwhm(*_pair(lo)) <= finesse_fwhm(*_pair(hi)) + 1e-9


def test_geometry_properties():
    g = EtalonGeometry(resonant_length=5.707e-6)
    assert g.tau == pytest.approx(2 * 5.707e-6 / 299792458.0, rel=1e-15)
    assert g.fsr == pytest.approx(1.0 / g.tau, rel=1e-15)
    assert g.x2 == g.length
    g2 = EtalonGeometry(resonant_length=5.707e-6, mismatch=10e-9, x1=2e-9)
    assert g2.length == pytest.approx(5.707e-6 + 10e-9)
    with pytest.raises(DomainError):
        EtalonGeometry(resonant_length=-1e-6)


def test_geometry_large_mismatch_warns():
    with pytest.warns(ModelValidityWarning):
        EtalonGeometry(resonant_length=5.707e-6, mismatch=1e-6)


def test_round_trip_factor_magnitude_and_phase():
    c1, c2 = _pair(0.3618)
    g = EtalonGeometry(resonant_length=5.719e-6)
    mu = round_trip_factor(c1, c2, g, 532e-9)
    assert abs(mu) == pytest.approx(0.3618, rel=1e-12)
    # resonant length: round-trip phase is a multiple of 2 pi
    length = nearest_resonant_length(c1, c2, 532e-9, 5.7e-6)
    mu_res = round_trip_factor(c1, c2, EtalonGeometry(resonant_length=length), 532e-9)
    assert np.angle(mu_res) == pytest.approx(0.0, abs=1e-9)


def test_peak_and_antiresonance_transmission():
    c1, c2 = _pair(0.3618)
    assert peak_transmission(c1, c2) == pytest.approx(1.0, rel=1e-12)
    lam = 532e-9
    length = nearest_resonant_length(c1, c2, lam, 5.7e-6)
    g_res = EtalonGeometry(resonant_length=length)
    assert steady_transmission(c1, c2, g_res, lam) == pytest.approx(1.0, rel=1e-9)
    # quarter-wave offset: T = (1-R)^2 / (1+R)^2
    g_anti = EtalonGeometry(resonant_length=length, mismatch=lam / 4)
    assert steady_transmission(c1, c2, g_anti, lam) == pytest.approx(
        0.21962761224965502, rel=1e-9
    )


def test_transmission_diverges_at_unit_loop_gain():
    c = SlabCoefficients.from_reflectivity(0.999999999999)
    # push |mu| to 1 by hand: enormous reflectivity still < 1 works, equal fails
    class FakeCoeff:
        r = 1.0 + 0j
        t = 0.0 + 0j
    g = EtalonGeometry(resonant_length=5e-6)
    with pytest.raises(DivergenceError):
        steady_transmission(FakeCoeff, FakeCoeff, g, 532e-9)
    # legitimate high contrast still finite
    assert steady_transmission(c, c, g, 532e-9) >= 0.0


def test_fringe_scan_fwhm_oracle():
    # FWHM in displacement = (lam/2) / finesse = 94.6955 nm for R=0.3618 at 532 nm
    c1, c2 = _pair(0.3618)
    lam = 532e-9
    length = nearest_resonant_length(c1, c2, lam, 5.7e-6)
    g = EtalonGeometry(resonant_length=length)
    d = np.linspace(-200e-9, 200e-9, 20001)
    series = fringe_scan(c1, c2, g, lam, d)
    above = series.y >= 0.5
    fwhm = d[above].max() - d[above].min()
    assert fwhm == pytest.approx(94.6955e-9, rel=1e-3)
    assert series.y.max() == pytest.approx(1.0, rel=1e-12)


def test_fringe_scan_periodicity():
    c1, c2 = _pair(0.3618)
    lam = 532e-9
    g = EtalonGeometry(resonant_length=5.719e-6)
    d = np.linspace(0.0, lam / 2, 40)
    s1 = fringe_scan(c1, c2, g, lam, d)
    s2 = fringe_scan(c1, c2, g, lam, d + lam / 2)
    np.testing.assert_allclose(s1.y, s2.y, rtol=1e-10)


def test_fringe_scan_short_span_warns():
    c1, c2 = _pair(0.3618)
    g = EtalonGeometry(resonant_length=5.719e-6)
    with pytest.warns(ModelValidityWarning):
        fringe_scan(c1, c2, g, 532e-9, np.linspace(0, 50e-9, 16))


def test_nearest_resonant_length_is_nearest():
    c1, c2 = _pair(0.3618)
    lam = 532e-9
    length = nearest_resonant_length(c1, c2, lam, 5.707e-6)
    assert abs(length - 5.707e-6) < lam / 4
    # neighbors one half wavelength away are also resonant
    for shift in (-lam / 2, lam / 2):
        g = EtalonGeometry(resonant_length=length + shift)
        assert steady_transmission(c1, c2, g, lam) == pytest.approx(1.0, rel=1e-9)
